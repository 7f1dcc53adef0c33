#include "cdyn/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "cdyn/error.hpp"

namespace cdyn {

Complex SpherePoint::value() const {
  if (infinite_) throw Error(ErrorCode::InvalidArgument, "point at infinity has no finite value");
  return value_;
}

double chordal_distance(const SpherePoint& a, const SpherePoint& b) {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite()) return 1.0 / std::sqrt(1.0 + std::norm(b.value()));
  if (b.is_infinite()) return 1.0 / std::sqrt(1.0 + std::norm(a.value()));
  const Complex z = a.value(), w = b.value();
  return std::abs(z - w) / (std::sqrt(1.0 + std::norm(z)) * std::sqrt(1.0 + std::norm(w)));
}

Polynomial::Polynomial() : coeffs_{Complex{}} {}

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == Complex{}) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(Complex{});
}

Polynomial Polynomial::monomial(int degree, Complex coeff) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative degree");
  std::vector<Complex> c(static_cast<std::size_t>(degree) + 1);
  c.back() = coeff;
  return Polynomial(std::move(c));
}

Complex Polynomial::operator()(Complex z) const noexcept {
  Complex acc = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

void Polynomial::eval_with_derivative(Complex z, Complex& value, Complex& deriv) const noexcept {
  Complex v = coeffs_.back();
  Complex dv{};
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) {
    dv = dv * z + v;
    v = v * z + *it;
  }
  value = v;
  deriv = dv;
}

double Polynomial::scale() const noexcept {
  double s = 0.0;
  for (const auto& c : coeffs_) s = std::max(s, std::abs(c));
  return s;
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  std::vector<Complex> c(static_cast<std::size_t>(std::max(p.degree(), q.degree())) + 1);
  for (int k = 0; k <= p.degree(); ++k) c[k] += p[k];
  for (int k = 0; k <= q.degree(); ++k) c[k] += q[k];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) { return p + Complex(-1.0) * q; }

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  std::vector<Complex> c(static_cast<std::size_t>(p.degree() + q.degree()) + 1);
  for (int i = 0; i <= p.degree(); ++i) {
    if (p[i] == Complex{}) continue;
    for (int j = 0; j <= q.degree(); ++j) c[i + j] += p[i] * q[j];
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(Complex s, const Polynomial& p) {
  std::vector<Complex> c(p.coeffs().begin(), p.coeffs().end());
  for (auto& x : c) x *= s;
  return Polynomial(std::move(c));
}

AffineMap AffineMap::inverse() const {
  if (a == Complex{}) throw Error(ErrorCode::InvalidArgument, "affine map with zero scale is not invertible");
  return AffineMap{1.0 / a, -b / a};
}

Complex eval(const Polynomial& p, Complex z) noexcept { return p(z); }

Polynomial derivative(const Polynomial& p) {
  if (p.degree() == 0) return Polynomial();
  std::vector<Complex> c(static_cast<std::size_t>(p.degree()));
  for (int k = 1; k <= p.degree(); ++k) c[k - 1] = static_cast<double>(k) * p[k];
  return Polynomial(std::move(c));
}

Polynomial compose(const Polynomial& p, const Polynomial& q, int degree_cap) {
  const long long target = static_cast<long long>(p.degree()) * q.degree();
  if (target > degree_cap) {
    throw Error(ErrorCode::SizeLimit, "composition degree " + std::to_string(target) +
                                          " exceeds cap " + std::to_string(degree_cap));
  }
  // Horner in the polynomial ring: ((a_d q + a_{d-1}) q + ...) + a_0.
  Polynomial acc({p.leading()});
  for (int k = p.degree() - 1; k >= 0; --k) acc = acc * q + Polynomial({p[k]});
  return acc;
}

double escape_radius(const Polynomial& p) {
  if (p.degree() < 2) throw Error(ErrorCode::InvalidArgument, "escape radius needs degree >= 2");
  double tail = 0.0;
  for (int k = 0; k < p.degree(); ++k) tail += std::abs(p[k]);
  return std::max(1.0, (2.0 + tail) / std::abs(p.leading()));
}

SpherePoint iterate(const Polynomial& p, const SpherePoint& z, int n, double radius) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative iteration count");
  if (z.is_infinite()) return z;
  Complex w = z.value();
  for (int k = 0; k < n; ++k) {
    w = p(w);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || std::abs(w) > radius)
      return SpherePoint::infinity();
  }
  return w;
}

SpherePoint iterate(const Polynomial& p, const SpherePoint& z, int n) {
  return iterate(p, z, n, escape_radius(p));
}

Polynomial conjugate_affine(const Polynomial& p, const AffineMap& phi) {
  const AffineMap inv = phi.inverse();
  const Polynomial inner = compose(p, inv.as_polynomial(), std::max(kDefaultDegreeCap, p.degree()));
  return phi.a * inner + Polynomial({phi.b});
}

namespace {

std::string normalize_minus(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2212 MINUS SIGN in UTF-8.
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x88 && static_cast<unsigned char>(text[i + 2]) == 0x92) {
      out.push_back('-');
      i += 2;
    } else if (!std::isspace(static_cast<unsigned char>(text[i]))) {
      out.push_back(text[i]);
    }
  }
  return out;
}

double parse_real(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorCode::Parse, "bad number '" + std::string(s) + "' in '" + std::string(whole) + "'");
  return v;
}

Complex parse_complex_normalized(const std::string& s) {
  if (s.empty()) throw Error(ErrorCode::Parse, "empty coefficient");
  if (s.back() != 'i') return {parse_real(s, s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is neither leading nor part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imag_part = [&](std::string_view t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t, s);
  };
  if (split == std::string::npos) return {0.0, imag_part(body)};
  return {parse_real(std::string_view(body).substr(0, split), s),
          imag_part(std::string_view(body).substr(split))};
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Complex parse_complex(std::string_view text) { return parse_complex_normalized(normalize_minus(text)); }

Polynomial parse_polynomial(std::string_view text) {
  const std::string s = normalize_minus(text);
  if (s.empty()) throw Error(ErrorCode::Parse, "empty polynomial");
  std::vector<Complex> coeffs;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    coeffs.push_back(parse_complex_normalized(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return Polynomial(std::move(coeffs));
}

std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return format_real(z.real());
  std::string im = format_real(z.imag());
  if (im.front() != '-') im.insert(im.begin(), '+');
  return format_real(z.real()) + im + "i";
}

std::string format_polynomial(const Polynomial& p) {
  std::string out;
  for (int k = 0; k <= p.degree(); ++k) {
    if (k) out += ',';
    out += format_complex(p[k]);
  }
  return out;
}

}  // namespace cdyn
