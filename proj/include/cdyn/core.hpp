#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdyn {

using Complex = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A point of the Riemann sphere: a finite complex value or infinity.
class SpherePoint {
 public:
  SpherePoint() = default;
  SpherePoint(Complex z) : value_(z) {}  // NOLINT(google-explicit-constructor)
  SpherePoint(double x) : value_(x, 0.0) {}  // NOLINT(google-explicit-constructor)

  static SpherePoint infinity() {
    SpherePoint p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }

  /// The finite value. Throws InvalidArgument for infinity.
  Complex value() const;

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) noexcept {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

 private:
  Complex value_{0.0, 0.0};
  bool infinite_ = false;
};

/// Chordal distance on the sphere; 0 for two infinities, at most 1.
double chordal_distance(const SpherePoint& a, const SpherePoint& b);

/// Complex polynomial a_0 + a_1 z + ... + a_d z^d with a_d != 0.
/// The zero polynomial is stored as the single coefficient 0 and has degree 0.
class Polynomial {
 public:
  Polynomial();
  /// Trailing zero coefficients are trimmed.
  explicit Polynomial(std::vector<Complex> coeffs);

  static Polynomial identity() { return Polynomial({0.0, 1.0}); }
  static Polynomial monomial(int degree, Complex coeff = 1.0);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex operator[](int k) const noexcept {
    return k >= 0 && k <= degree() ? coeffs_[static_cast<std::size_t>(k)] : Complex{};
  }
  Complex leading() const noexcept { return coeffs_.back(); }

  /// Horner evaluation.
  Complex operator()(Complex z) const noexcept;
  /// Value and first derivative in one Horner pass.
  void eval_with_derivative(Complex z, Complex& value, Complex& deriv) const noexcept;

  /// Largest coefficient modulus.
  double scale() const noexcept;

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(Complex s, const Polynomial& p);

 private:
  std::vector<Complex> coeffs_;
};

/// Invertible affine map w = a z + b.
struct AffineMap {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};

  Complex operator()(Complex z) const noexcept { return a * z + b; }
  AffineMap inverse() const;
  Polynomial as_polynomial() const { return Polynomial({b, a}); }
};

inline constexpr int kDefaultDegreeCap = 4096;

Complex eval(const Polynomial& p, Complex z) noexcept;
Polynomial derivative(const Polynomial& p);
/// Coefficients of p(q(z)). Throws SizeLimit if deg p * deg q exceeds `degree_cap`.
Polynomial compose(const Polynomial& p, const Polynomial& q, int degree_cap = kDefaultDegreeCap);

/// R with |z| > R  =>  |P(z)| >= 2|z|, namely max(1, (2 + sum_{k<d}|a_k|) / |a_d|).
double escape_radius(const Polynomial& p);

/// P^n(z), or infinity as soon as an orbit point exceeds `radius` in modulus.
/// A non-finite intermediate value is also reported as infinity.
SpherePoint iterate(const Polynomial& p, const SpherePoint& z, int n, double radius);
/// Same with radius = escape_radius(p).
SpherePoint iterate(const Polynomial& p, const SpherePoint& z, int n);

/// Q = phi o P o phi^{-1}, so that Q o phi = phi o P.
Polynomial conjugate_affine(const Polynomial& p, const AffineMap& phi);

/// Polynomial text format: comma separated ascending coefficients, each "RE",
/// "IMi" or "RE+IMi" / "RE-IMi". U+2212 is accepted as a minus sign.
Polynomial parse_polynomial(std::string_view text);
Complex parse_complex(std::string_view text);
/// Round-trip formatting (17 significant digits) in the same text format.
std::string format_polynomial(const Polynomial& p);
std::string format_complex(Complex z);

}  // namespace cdyn
