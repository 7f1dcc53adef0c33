#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cdyn/core.hpp"
#include "cdyn/roots.hpp"
#include "cdyn/sampling.hpp"

namespace cdyn {

enum class OrbitKind { Superattracting, Attracting, Repelling, RationallyNeutral, IrrationallyNeutral };

struct Classification {
  OrbitKind kind = OrbitKind::Repelling;
  int q = 0;  // order of the root of unity for RationallyNeutral, else 0

  bool repelling() const noexcept { return kind == OrbitKind::Repelling; }
  friend bool operator==(const Classification&, const Classification&) = default;
};

std::string to_string(const Classification& c);

struct PeriodicOrbit {
  std::vector<Complex> points;  // in dynamical order: P(points[i]) = points[i+1 mod period]
  int period = 1;
  Complex multiplier;
  Classification classification;
  int multiplicity = 1;  // as a root of P^m(z) - z
};

/// E = {inf} or {inf, z0}.
struct ExceptionalSet {
  std::vector<SpherePoint> points;

  std::size_t size() const noexcept { return points.size(); }
  /// Finite member, if any.
  bool has_finite() const noexcept { return points.size() == 2; }
  Complex finite_point() const { return points.at(1).value(); }
  bool contains(const SpherePoint& p, double tol = 1e-9) const;
};

struct ClassifyOptions {
  double neutral_tol = 1e-6;
  int root_of_unity_max = 64;
};

/// Solutions of P^m(z) = z with multiplicity (d^m of them). The iterate is never
/// expanded symbolically: the solver evaluates P^m and its derivative along the orbit.
/// Throws SizeLimit when d^m exceeds `cap`.
RootSet periodic_points(const Polynomial& p, int m, int cap = kDefaultDegreeCap);

/// Product of P' over the cycle. Throws NotACycle if P(points[i]) is not
/// points[i+1 mod n] within 1e-7 (1 + |z|).
Complex multiplier(const Polynomial& p, std::span<const Complex> points);

Classification classify(Complex lambda, double neutral_tol = 1e-6, int root_of_unity_max = 64);

/// Partition roots of P^m(z) - z into cycles of exact period q | m (the least
/// divisor with P^q(z) ~ z within 1e-7 (1 + |z|)).
std::vector<PeriodicOrbit> group_into_orbits(const RootSet& roots, const Polynomial& p, int m,
                                             const ClassifyOptions& options = {});

struct Census {
  int nonrepelling = 0;  // includes the superattracting orbit at infinity
  int bound = 0;         // 3d - 1
  std::vector<PeriodicOrbit> orbits;  // finite orbits of exact period <= m_max
};

/// Every finite periodic orbit of exact period <= m_max plus the count of
/// non-repelling ones. Throws AssertionFailed if the count exceeds 3d - 1.
Census orbit_census(const Polynomial& p, int m_max, const ClassifyOptions& options = {});
int nonrepelling_census(const Polynomial& p, int m_max);

/// {inf, z0} when P = a (z - z0)^d + z0, else {inf}.
ExceptionalSet exceptional_set(const Polynomial& p, double tol = 1e-9);

/// Weighted point set. Weights sum to 1.
struct PointCloud {
  std::vector<Complex> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.size(); }
};

struct CloudOptions {
  int burn_in = 20;
  int tasks = 1;
};

/// Picks one preimage of w, cluster k with probability mult_k / d.
Complex random_preimage(const Polynomial& p, Complex w, Engine& engine);

/// `count` independent backward orbits of length `steps` from z; returns the
/// endpoints, ordered by task then by sample. Stream for task t is
/// derive_seed(seed, t), so output depends only on (seed, tasks).
std::vector<Complex> sample_backward_orbits(const Polynomial& p, Complex z, int steps, long count,
                                            std::uint64_t seed, int tasks);

/// Julia-set point cloud from backward orbits of a non-exceptional basepoint.
/// If d^depth <= budget: the full preimage tree at `depth` (weights 1/d^depth
/// times multiplicity). Otherwise `budget` stochastic orbits of burn_in + depth
/// steps, each endpoint weighted 1/budget.
PointCloud julia_cloud(const Polynomial& p, Complex z, int depth, long budget, std::uint64_t seed,
                       const CloudOptions& options = {});

/// d^n if it does not exceed `limit`, else limit + 1.
long bounded_power(int d, int n, long limit) noexcept;

}  // namespace cdyn
