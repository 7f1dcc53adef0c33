#pragma once

#include <vector>

#include "cdyn/core.hpp"
#include "cdyn/series.hpp"

namespace cdyn {

/// Result of a local conjugacy computation. For Koenigs and Siegel the series
/// is in z - center; for Boettcher it is in u = c (z - center) with c = gauge.
struct Linearization {
  PowerSeries series;
  Complex center;
  Complex multiplier;
  Complex gauge{1.0, 0.0};
  int local_degree = 1;
  double residual = 0.0;         ///< functional-equation residual on the test circle
  double residual_radius = 0.0;
  double denominators_min = 0.0; ///< min |lambda^j - lambda| used (inf if none)
  std::vector<double> denominators;  ///< |lambda^j - lambda| for j = 2..N
};

struct LinearizeOptions {
  double neutral_tol = 1e-6;
  double resonance_floor = 1e-12;
  int residual_samples = 64;
};

/// Koenigs coordinate phi with phi(P(z)) = lambda phi(z). Attracting or repelling.
Linearization koenigs(const Polynomial& p, Complex z0, int order,
                      const LinearizeOptions& opts = {});

/// max |phi(P(z)) - lambda phi(z)| over |z - z0| = r.
double koenigs_residual(const Polynomial& p, const Linearization& lin, double r, int samples = 64);

struct GreenValue {
  double value = 0.0;
  bool escaped = false;
  int steps = 0;
};

/// Green function of the basin of infinity. Returns 0 with escaped = false if
/// the orbit stays bounded for n_max steps.
GreenValue green_function(const Polynomial& p, Complex z, int n_max = 500);

/// Boettcher coordinate at a finite superattracting fixed point.
Linearization boettcher_series(const Polynomial& p, Complex z0, int order,
                               const LinearizeOptions& opts = {});

/// max |phi(c(P(z) - z0)) - phi(c(z - z0))^p| over |z - z0| = r.
double boettcher_residual(const Polynomial& p, const Linearization& lin, double r,
                          int samples = 64);

/// Siegel linearizer h with h(lambda z) = P(h(z)), h(0) = 0, h'(0) = 1.
Linearization siegel_series(Complex lambda, const Polynomial& p, int order,
                            double residual_radius = 0.01);

/// max |h(lambda z) - P(h(z))| over |z| = r.
double siegel_residual(const Polynomial& p, const Linearization& lin, double r, int samples = 64);

/// e^{2 pi i golden}, golden = (sqrt 5 - 1)/2.
double golden_theta();

struct DiophantineParams {
  double c = 1.0;
  double mu = 2.0;
  long long n_max = 10000;
};

struct DiophantineReport {
  double margin = 0.0;  ///< min_n |lambda^n - 1| n^mu
  long long argmin = 0;
  bool pass = false;
};

/// |e^{2 pi i n theta} - 1| computed as 2|sin(pi frac(n theta))|.
double rotation_distance(double theta, long long n);

DiophantineReport diophantine_check(double theta, const DiophantineParams& params);

struct CremerGrowth {
  int degree = 2;
  double lhs_log = 0.0;       ///< log(4 pi 2^{q_l - q_{l+1}})
  double rhs_log = 0.0;       ///< log((1/l)^{d^{2^{q_l}}}), may be -inf
  double exponent_log = 0.0;  ///< log(d^{2^{q_l}})
  bool representable = true;  ///< d^{2^{q_l}} fits in a double
  bool holds = false;
};

struct CremerTerm {
  int ell = 1;
  double distance = 0.0;  ///< |lambda^{2^{q_l}} - 1|
  double bound = 0.0;     ///< 4 pi 2^{q_l - q_{l+1}}
  bool certified = false;
  std::vector<CremerGrowth> growth;
};

struct CremerReport {
  double theta = 0.0;
  std::vector<CremerTerm> terms;
};

/// theta = sum_{k <= L} 2^{-q_k} with smallness certificates for l < L.
CremerReport cremer_theta(const std::vector<int>& q, int terms,
                          const std::vector<int>& degrees = {2});

struct RadiusBound {
  double r_max = 1.0;
  int argmin = 0;
};

/// min over n <= n_max of |lambda^n - 1|^{1/(d^n - 1)}.
RadiusBound siegel_radius_bound(Complex lambda, int degree, int n_max);

struct KamSchedule {
  std::vector<double> r, eta, delta;
  std::vector<bool> valid;
  bool all_valid = true;
  double eta_sum = 0.0;
  double radius_ratio = 0.0;  ///< limit of r_n / r_0, product continued past `steps`
};

KamSchedule kam_schedule(double eta0, double delta0, double c0, double mu, int steps,
                         double r0 = 1.0);

struct FatouSample {
  double w = 0.0;
  double deviation = 0.0;  ///< |Q(w) - w - 1|
};

struct PetalReport {
  int order = 1;
  Complex leading;            ///< a in z + a z^{k+1} + ...
  Polynomial normalized;      ///< map the petal is verified on
  bool sector_exact = true;   ///< normalized map is exact (always for k = 1)
  double epsilon = 0.05;
  double epsilon_image = 0.0;
  int boundary_samples = 360;
  bool boundary_inside = false;
  long long orbit_steps = 0;
  bool orbit_converged = false;
  std::vector<FatouSample> fatou;
  bool verified = false;
};

struct PetalOptions {
  double epsilon = 0.05;
  int samples = 360;
  double target = 1e-6;
  long long max_steps = 10'000'000;
};

/// Attracting petal for P = z + a z^{k+1} + ... For k >= 2 the check runs on
/// the sector map of w = (k a) z^k when that map is a polynomial.
PetalReport parabolic_petal(const Polynomial& p, int k, const PetalOptions& opts = {});

/// For P = z + a z^{k+1} + ..., the sector map of w = z^k truncated to `order`:
/// (P(z))^k written in w when P(z)/z is a series in z^k.
PowerSeries sector_map(const Polynomial& p, int k, int order);

/// Fatou coordinate conjugate Q(w) = -1/P(-1/w).
Complex fatou_conjugate(const Polynomial& p, Complex w);

}  // namespace cdyn
