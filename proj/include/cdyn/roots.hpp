#pragma once

#include <functional>
#include <vector>

#include "cdyn/core.hpp"

namespace cdyn {

/// Roots counted with multiplicity. residuals[i] is |f(roots[i])| for the solved f.
struct RootSet {
  std::vector<Complex> roots;
  std::vector<int> multiplicities;
  std::vector<double> residuals;

  std::size_t size() const noexcept { return roots.size(); }
  int total_multiplicity() const noexcept;
  double max_residual() const noexcept;
};

/// Value, derivative and a rounding-error bound for |value| at one point.
struct Evaluation {
  Complex value;
  Complex derivative;
  double error_bound = 0.0;
};

using Evaluator = std::function<Evaluation(Complex)>;

struct SolverOptions {
  double tol = 1e-9;   // accept |f(root)| < tol * scale
  int max_iter = 500;
};

/// Aberth-Ehrlich simultaneous iteration for a function with exactly `degree`
/// zeros (counted with multiplicity), started from `degree` points on the circle
/// |z| = radius. Returns unclustered roots, multiplicity 1 each.
/// Throws NonConvergence when some residual stays above tol * scale and above
/// twice the rounding bound after max_iter sweeps.
RootSet solve_simultaneous(int degree, const Evaluator& f, double radius, double scale,
                           const SolverOptions& options = {});

/// Same iteration started from caller-supplied approximations (one per root).
RootSet solve_simultaneous(std::vector<Complex> initial, const Evaluator& f, double scale,
                           const SolverOptions& options = {});

/// All d roots of P, unclustered. Initial circle radius 1 + max|a_k / a_d|.
RootSet all_roots(const Polynomial& p, double tol = 1e-9, int max_iter = 500);

/// Merge roots closer than eps (transitively) into their multiplicity-weighted
/// centroid, summing multiplicities.
RootSet cluster(const RootSet& roots, double eps);

/// Like cluster(), but additionally merges roots whose Newton inclusion discs
/// |z - z_i| <= radii[i] overlap. Separates genuine k-fold roots, whose
/// approximations scatter by ~eps^(1/k), from distinct nearby roots.
RootSet cluster_inclusion(const RootSet& roots, const std::vector<double>& radii, double eps);

/// Refines the centre of every cluster of multiplicity k >= 2 by Newton's
/// method on p^(k-1), keeping the refinement only if it stays near the cluster.
void polish_multiple_roots(const Polynomial& p, RootSet& roots, const std::vector<double>& radii);

/// Default clustering threshold for preimages of w: 1e-6 * (1 + |w|).
inline double preimage_cluster_eps(Complex w) { return 1e-6 * (1.0 + std::abs(w)); }

/// Solutions of P(z) = w, clustered, multiplicities summing to deg P.
RootSet preimages(const Polynomial& p, Complex w, double tol = 1e-9, int max_iter = 500);

}  // namespace cdyn
