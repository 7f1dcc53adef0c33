#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cdyn/core.hpp"
#include "cdyn/series.hpp"

namespace cdyn {

/// Hyperbolic distance atanh |(z - w) / (1 - conj(z) w)|. OutsideDisc unless |z|, |w| < 1.
double poincare_distance(Complex z, Complex w);

enum class DiscMapKind { Blaschke, Polynomial, Series };

/// Holomorphic map of the unit disc into its closure.
struct DiscMap {
  std::function<Complex(Complex)> eval;
  DiscMapKind kind = DiscMapKind::Polynomial;
  std::string label;
  bool automorphism = false;

  Complex operator()(Complex z) const { return eval(z); }
};

/// Grid check |f(z)| < 1 on |z| = 1 - 1e-3 and |f(z)| <= 1 + 1e-12 on |z| = 1;
/// NotASelfMap otherwise.
void validate_self_map(const DiscMap& f, int samples = 1024);

/// rotation * prod_k (z - a_k) / (1 - conj(a_k) z); an automorphism for one factor.
DiscMap blaschke(const std::vector<Complex>& zeros, Complex rotation = 1.0);
/// rotation * (z + t) / (1 + conj(t) z).
DiscMap mobius(Complex t, Complex rotation = 1.0);
DiscMap polynomial_map(const Polynomial& p);
DiscMap series_map(const PowerSeries& s);

struct SchwarzPick {
  double ratio = 0.0;  ///< rho(f z, f w) / rho(z, w)
  bool pass = false;   ///< ratio <= 1 + 1e-10
};

SchwarzPick schwarz_pick(const DiscMap& f, Complex z, Complex w);

enum class DenjoyWolffKind { InteriorFixed, BoundaryPoint, Undecided };
std::string to_string(DenjoyWolffKind k);

struct DenjoyWolff {
  Complex alpha;
  DenjoyWolffKind kind = DenjoyWolffKind::Undecided;
  long steps = 0;
  Complex derivative;  ///< f'(alpha) by central difference (interior case)
};

/// Iterates f from z0 until the step is below tol (Poincare distance, or
/// Euclidean once |z| > 0.999) or n_max steps pass.
DenjoyWolff denjoy_wolff(const DiscMap& f, Complex z0, double tol = 1e-10, long n_max = 1'000'000);

/// g(z) = 1/z + sum_{n>=0} b_n z^n.
struct LaurentTail {
  std::vector<Complex> b;

  Complex operator()(Complex z) const;
  Complex derivative(Complex z) const;
};

struct AreaReport {
  double sum = 0.0;  ///< sum n |b_n|^2
  bool pass = false; ///< sum <= 1 + 1e-9
  std::vector<double> partial_sums;
  bool grid_injective = true;
  int critical_points = 0;  ///< zeros of g' in |z| < 0.999
  bool univalence_suspect = false;
};

AreaReport area_theorem_sum(const LaurentTail& g);

/// Normalized f = z + a_2 z^2 + ... with a series and an evaluator.
struct UnivalentFunction {
  PowerSeries series;
  std::function<Complex(Complex)> eval;
  std::function<Complex(Complex)> deriv;
  std::string label;
};

UnivalentFunction from_series(const PowerSeries& s, std::string label = "series");
/// k(z) = z / (1 - z)^2 with its series truncated at `order`; evaluated in closed form.
UnivalentFunction koebe_function(int order);

/// Pairwise-distinct check of f on a polar grid of about 10^3 points in |z| <= 0.95.
bool grid_injective(const std::function<Complex(Complex)>& f, double tol = 1e-9);

/// Winding number of the closed curve f(r e^{i theta}) about w from `samples` points.
int winding_number(const std::vector<Complex>& curve, Complex w);

struct KoebeReport {
  Complex a2;
  bool a2_ok = false;        ///< |a_2| <= 2 + 1e-9
  double cover_radius = 0.24;
  int grid_points = 0;
  int uncovered = 0;         ///< grid points with winding number != 1
  bool covered = false;
  bool univalent_grid = true;
  bool pass = false;
};

/// NotNormalized unless f(0) = 0 and f'(0) = 1.
KoebeReport koebe_quarter_check(const UnivalentFunction& f, int resolution = 41,
                                int boundary_samples = 4096, double r = 0.999);

struct DistortionReport {
  double s = 0.5;
  double diameter = 0.0;      ///< sup over |z|, |w| <= s of |f(z) - f(w)|
  double area = 0.0;          ///< quadrature of |f'|^2 over the unit disc
  double series_area = 0.0;   ///< pi sum n |a_n|^2
  double ratio = 0.0;         ///< diameter / sqrt(area)
};

DistortionReport koebe_distortion_check(const UnivalentFunction& f, double s, int samples = 512);

}  // namespace cdyn
