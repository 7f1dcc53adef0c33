#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cdyn/core.hpp"

namespace cdyn {

struct Atom {
  SpherePoint point;
  double weight = 0.0;
};

/// Finite weighted point set on the sphere. Probability measures have total
/// mass 1; pullback returns mass d times the input mass.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  static EmpiricalMeasure dirac(const SpherePoint& p) { return EmpiricalMeasure({{p, 1.0}}); }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double mass() const noexcept;

  void add(const SpherePoint& p, double weight) { atoms_.push_back({p, weight}); }
  EmpiricalMeasure scaled(double factor) const;
  /// Coincident atoms merged, weights summed. Atoms match within 1e-8 (1 + |z|).
  EmpiricalMeasure merged(double rel_tol = 1e-8) const;
  /// Scaled to mass 1 and merged.
  EmpiricalMeasure normalized() const;
  /// (1 - t) this + t other, as weighted concatenation.
  EmpiricalMeasure mixed(const EmpiricalMeasure& other, double t) const;

 private:
  std::vector<Atom> atoms_;
};

/// Sum of |w_a - w_b| over atoms matched within rel_tol (1 + |z|).
double total_variation(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                       double rel_tol = 1e-8);

/// True if both measures have the same atoms with weights equal within weight_tol.
bool same_measure(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double rel_tol = 1e-8,
                  double weight_tol = 1e-8);

/// CSV "re,im,weight" with infinity written as "inf,inf,w".
std::string measure_csv(const EmpiricalMeasure& m);

/// Complex-valued function on the sphere.
struct TestFunction {
  std::function<Complex(const SpherePoint&)> eval;
  std::string label;

  Complex operator()(const SpherePoint& p) const { return eval(p); }
};

/// Finite-plane function extended to infinity by `at_infinity`; if that is
/// absent the function is undefined at infinity (UndefinedAtAtom).
TestFunction finite_function(std::string label, std::function<Complex(Complex)> f);
TestFunction finite_function(std::string label, std::function<Complex(Complex)> f,
                             Complex at_infinity);

/// {Re z, Im z, |z|^2, 1/(1+|z|^2), Re z^2, Im z^2}. Only 1/(1+|z|^2) is
/// defined at infinity (value 0).
std::vector<TestFunction> default_panel();

/// Indicator of Im z > 0 (the upper half plane); 0 at infinity.
TestFunction upper_half_indicator();

/// Each finite atom (y, w) becomes its preimages with weight w * multiplicity;
/// the infinity atom keeps its place with weight d w.
EmpiricalMeasure pullback(const Polynomial& p, const EmpiricalMeasure& nu);

/// (P^n)^* nu / d^n, merged.
EmpiricalMeasure normalized_pullback(const Polynomial& p, const EmpiricalMeasure& nu, int n);

struct MeasureOptions {
  long budget = 1L << 16;  ///< exact mode iff d^n <= budget
  int tasks = 1;
};

/// Uniform measure on the preimages of x under P^n counted with multiplicity.
/// Exact when d^n <= budget, otherwise `budget` stochastic backward orbits.
EmpiricalMeasure mu_nx(const Polynomial& p, const SpherePoint& x, int n, std::uint64_t seed,
                       const MeasureOptions& opts = {});

bool exact_mode(const Polynomial& p, int n, long budget);

/// (1/n) sum_{j=1..n} mu_{j,x}. Sampled levels use derive_seed(seed, j).
EmpiricalMeasure cesaro(const Polynomial& p, const SpherePoint& x, int n, std::uint64_t seed,
                        const MeasureOptions& opts = {});

/// All Cesaro means lambda_1..lambda_n at once (exact mode only).
std::vector<EmpiricalMeasure> cesaro_sequence(const Polynomial& p, const SpherePoint& x, int n);

/// sum w_i phi(atom_i). UndefinedAtAtom if phi has no finite value at an atom.
Complex integrate(const EmpiricalMeasure& mu, const TestFunction& phi);

/// z -> sum over preimages w of z of mult(w) phi(w); at infinity d phi(inf).
TestFunction pushforward_fn(const Polynomial& p, const TestFunction& phi);

/// |int phi d(P^* nu) - int (P_* phi) d nu|.
double duality_residual(const Polynomial& p, const TestFunction& phi, const EmpiricalMeasure& nu);

/// max over the panel of |int phi da - int phi db|.
double panel_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                      const std::vector<TestFunction>& panel);

struct PanelEntry {
  std::string label;
  Complex at_x, at_y;
  double diff = 0.0;
  double std_error = 0.0;  ///< Monte-Carlo standard error of the difference (0 when exact)
};

struct GapReport {
  double gap = 0.0;
  double std_error = 0.0;  ///< standard error of the maximizing entry
  bool exact = true;
  std::vector<PanelEntry> entries;
};

/// max over the panel of |int phi d mu_{n,x} - int phi d mu_{n,y}|.
GapReport weak_gap(const Polynomial& p, Complex x, Complex y, int n,
                   const std::vector<TestFunction>& panel, std::uint64_t seed,
                   const MeasureOptions& opts = {});

/// int phi (psi o P^n) d mu - (int phi d mu)(int psi d mu).
Complex mixing_correlation(const Polynomial& p, const TestFunction& phi, const TestFunction& psi,
                           int n, const EmpiricalMeasure& mu);

/// int phi (psi o P^n) d mu.
Complex joint_integral(const Polynomial& p, const TestFunction& phi, const TestFunction& psi,
                       int n, const EmpiricalMeasure& mu);

struct ErgodicityStep {
  int n = 0;
  double joint = 0.0;  ///< mu(E intersect P^{-n} E)
};

struct ErgodicityReport {
  double mass = 0.0;               ///< mu(E)
  double invariance_defect = 0.0;  ///< mu(E symmetric-difference P^{-1} E)
  bool invariant = false;
  bool consistent = true;  ///< invariant => mass in {0, 1}
  double mixing_gap = 0.0; ///< |joint at the last n - mass^2|
  std::vector<ErgodicityStep> steps;
};

/// E must take values in {0, 1} on every atom.
ErgodicityReport ergodicity_check(const Polynomial& p, const TestFunction& indicator,
                                  const EmpiricalMeasure& mu,
                                  const std::vector<int>& schedule = {1, 2, 4, 8},
                                  double tol = 1e-6);

/// Forward images P^q(c), q = 1..ell, of the finite critical points; orbits
/// that leave the escape radius are cut off.
std::vector<Complex> postcritical_points(const Polynomial& p, int ell = 20);

struct LyubichOptions {
  int ell = 20;
  int boundary_samples = 16;
  int tasks = 1;
};

struct LyubichLevel {
  int n = 0;
  double mean_log_diameter = 0.0;
  double std_error = 0.0;
  double median_diameter = 0.0;
  double fraction_exceeding = 0.0;  ///< share of branches with diam > c d^{-n/2}
};

struct LyubichReport {
  std::vector<LyubichLevel> levels;
  double slope = 0.0;         ///< least-squares slope of mean log diameter in n
  double intercept = 0.0;
  double target_slope = 0.0;  ///< -ln(d)/2
  double fitted_c = 0.0;
  double fraction_below = 0.0;  ///< over all n >= 1 and branches
  long branches = 0;
};

/// Diameters of inverse-branch images of the disc D(center, radius) along
/// `branches` random backward orbits of the center, for n = 0..n_max.
/// c is the 90th percentile of diam d^{n/2} at n = 1.
LyubichReport lyubich_diameters(const Polynomial& p, Complex center, double radius, int n_max,
                                long branches, std::uint64_t seed,
                                const LyubichOptions& opts = {});

}  // namespace cdyn
