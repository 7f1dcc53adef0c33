#include "cdyn/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cdyn/error.hpp"

namespace cdyn {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double period_tol(Complex z) { return 1e-7 * (1.0 + std::abs(z)); }
double match_tol(Complex z) { return 1e-6 * (1.0 + std::abs(z)); }

Complex iterate_finite(const Polynomial& p, Complex z, int n) {
  for (int k = 0; k < n; ++k) z = p(z);
  return z;
}

}  // namespace

std::string to_string(const Classification& c) {
  switch (c.kind) {
    case OrbitKind::Superattracting: return "Superattracting";
    case OrbitKind::Attracting: return "Attracting";
    case OrbitKind::Repelling: return "Repelling";
    case OrbitKind::RationallyNeutral: return "RationallyNeutral(" + std::to_string(c.q) + ")";
    case OrbitKind::IrrationallyNeutral: return "IrrationallyNeutral";
  }
  return "?";
}

bool ExceptionalSet::contains(const SpherePoint& p, double tol) const {
  if (p.is_infinite()) return true;
  return has_finite() && std::abs(p.value() - finite_point()) <= tol * (1.0 + std::abs(finite_point()));
}

long bounded_power(int d, int n, long limit) noexcept {
  long v = 1;
  for (int k = 0; k < n; ++k) {
    if (v > limit / std::max(d, 1)) return limit + 1;
    v *= d;
  }
  return v;
}

RootSet periodic_points(const Polynomial& p, int m, int cap) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
  const int d = p.degree();
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "periodic points need degree >= 2");
  const long n = bounded_power(d, m, cap);
  if (n > cap) {
    throw Error(ErrorCode::SizeLimit, "d^m exceeds the symbolic cap " + std::to_string(cap));
  }
  std::vector<double> abs_coeffs;
  for (const auto& c : p.coeffs()) abs_coeffs.push_back(std::abs(c));
  auto magnitude = [&](double r) {
    double acc = abs_coeffs.back();
    for (auto it = abs_coeffs.rbegin() + 1; it != abs_coeffs.rend(); ++it) acc = acc * r + *it;
    return acc;
  };
  // f(z) = P^m(z) - z along the orbit, with a first-order running rounding bound.
  Evaluator f = [&, m, d](Complex z) {
    Complex w = z, deriv = 1.0;
    double err = 0.0;
    for (int k = 0; k < m; ++k) {
      Complex v, dv;
      p.eval_with_derivative(w, v, dv);
      err = std::abs(dv) * err + 4.0 * kEps * (d + 1) * magnitude(std::abs(w));
      deriv *= dv;
      w = v;
    }
    Evaluation e;
    e.value = w - z;
    e.derivative = deriv - 1.0;
    e.error_bound = err + kEps * std::abs(z);
    return e;
  };
  // Start from the depth-m preimage tree of a point outside the escape disc:
  // d^m points near the Julia set, spread like the periodic points, and with
  // |P^m| bounded so nothing overflows.
  const double radius = escape_radius(p);
  std::vector<Complex> start{Complex(radius + 1.0, 0.5)};
  for (int level = 0; level < m; ++level) {
    std::vector<Complex> next;
    next.reserve(start.size() * static_cast<std::size_t>(d));
    for (Complex w : start) {
      const RootSet pre = preimages(p, w);
      for (std::size_t k = 0; k < pre.size(); ++k)
        for (int j = 0; j < pre.multiplicities[k]; ++j)
          next.push_back(pre.roots[k] + Complex(1e-9 * j, 1e-9 * j));
    }
    start = std::move(next);
  }
  const RootSet raw = solve_simultaneous(std::move(start), f, std::max(1.0, radius));
  std::vector<double> radii(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Evaluation e = f(raw.roots[i]);
    const double slope = std::abs(e.derivative);
    radii[i] = slope > 0.0 ? static_cast<double>(n) * raw.residuals[i] / slope : kInf;
  }
  return cluster_inclusion(raw, radii, 1e-6);
}

Complex multiplier(const Polynomial& p, std::span<const Complex> points) {
  if (points.empty()) throw Error(ErrorCode::NotACycle, "empty cycle");
  const Polynomial dp = derivative(p);
  Complex lambda = 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Complex next = points[(i + 1) % points.size()];
    if (std::abs(p(points[i]) - next) > period_tol(next)) {
      std::ostringstream msg;
      msg << "P(points[" << i << "]) misses the next cycle point by " << std::abs(p(points[i]) - next);
      throw Error(ErrorCode::NotACycle, msg.str());
    }
    lambda *= dp(points[i]);
  }
  return lambda;
}

Classification classify(Complex lambda, double neutral_tol, int root_of_unity_max) {
  if (!(neutral_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "neutral_tol must be positive");
  const double r = std::abs(lambda);
  if (r < neutral_tol) return {OrbitKind::Superattracting, 0};
  if (r < 1.0 - neutral_tol) return {OrbitKind::Attracting, 0};
  if (r > 1.0 + neutral_tol) return {OrbitKind::Repelling, 0};
  Complex power = 1.0;
  for (int q = 1; q <= root_of_unity_max; ++q) {
    power *= lambda;
    if (std::abs(power - 1.0) < neutral_tol) return {OrbitKind::RationallyNeutral, q};
  }
  return {OrbitKind::IrrationallyNeutral, 0};
}

std::vector<PeriodicOrbit> group_into_orbits(const RootSet& roots, const Polynomial& p, int m,
                                             const ClassifyOptions& options) {
  const std::size_t n = roots.size();
  std::vector<long> owner(n, -1);
  std::vector<PeriodicOrbit> orbits;

  auto find_root = [&](Complex z) -> long {
    long best = -1;
    double best_dist = match_tol(z);
    for (std::size_t j = 0; j < n; ++j) {
      const double dist = std::abs(roots.roots[j] - z);
      if (dist <= best_dist) {
        best = static_cast<long>(j);
        best_dist = dist;
      }
    }
    return best;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] >= 0) continue;
    const Complex z = roots.roots[i];
    int period = m;
    for (int q = 1; q <= m; ++q) {
      if (m % q != 0) continue;
      if (std::abs(iterate_finite(p, z, q) - z) < period_tol(z)) {
        period = q;
        break;
      }
    }
    PeriodicOrbit orbit;
    orbit.period = period;
    orbit.multiplicity = roots.multiplicities[i];
    const auto id = static_cast<long>(orbits.size());
    Complex w = z;
    for (int k = 0; k < period; ++k) {
      const long j = k == 0 ? static_cast<long>(i) : find_root(w);
      if (j < 0) {
        std::ostringstream msg;
        msg << "cycle point " << format_complex(w) << " matches no root of P^" << m << " - z";
        throw Error(ErrorCode::AmbiguousGrouping, msg.str());
      }
      if (owner[j] >= 0 && owner[j] != id) {
        throw Error(ErrorCode::AmbiguousGrouping,
                    "cycle through " + format_complex(z) + " overlaps an earlier cycle");
      }
      if (owner[j] == id) {
        throw Error(ErrorCode::AmbiguousGrouping,
                    "cycle through " + format_complex(z) + " revisits a point before closing");
      }
      owner[j] = id;
      orbit.points.push_back(roots.roots[j]);
      w = p(roots.roots[j]);
    }
    orbit.multiplier = multiplier(p, orbit.points);
    orbit.classification = classify(orbit.multiplier, options.neutral_tol, options.root_of_unity_max);
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

Census orbit_census(const Polynomial& p, int m_max, const ClassifyOptions& options) {
  const int d = p.degree();
  Census census;
  census.bound = 3 * d - 1;
  census.nonrepelling = 1;  // infinity
  for (int m = 1; m <= m_max; ++m) {
    for (auto& orbit : group_into_orbits(periodic_points(p, m), p, m, options)) {
      if (orbit.period != m) continue;
      if (!orbit.classification.repelling()) ++census.nonrepelling;
      census.orbits.push_back(std::move(orbit));
    }
  }
  if (census.nonrepelling > census.bound) {
    throw Error(ErrorCode::AssertionFailed, std::to_string(census.nonrepelling) +
                                                " non-repelling orbits exceed 3d-1 = " +
                                                std::to_string(census.bound));
  }
  return census;
}

int nonrepelling_census(const Polynomial& p, int m_max) { return orbit_census(p, m_max).nonrepelling; }

ExceptionalSet exceptional_set(const Polynomial& p, double tol) {
  const int d = p.degree();
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "exceptional set needs degree >= 2");
  ExceptionalSet e;
  e.points.push_back(SpherePoint::infinity());
  const Complex z0 = -p[d - 1] / (static_cast<double>(d) * p.leading());
  // Q(w) = P(w + z0) - z0 must reduce to a w^d.
  const Polynomial centered = conjugate_affine(p, AffineMap{1.0, -z0});
  const double scale = std::max({1.0, p.scale(), std::abs(p.leading()) * std::pow(std::max(1.0, std::abs(z0)), d)});
  for (int k = 0; k < d; ++k) {
    if (std::abs(centered[k]) > tol * scale) return e;
  }
  e.points.emplace_back(z0);
  return e;
}

Complex random_preimage(const Polynomial& p, Complex w, Engine& engine) {
  const RootSet pre = preimages(p, w);
  const double u = uniform01(engine) * p.degree();
  double acc = 0.0;
  for (std::size_t k = 0; k < pre.size(); ++k) {
    acc += pre.multiplicities[k];
    if (u < acc) return pre.roots[k];
  }
  return pre.roots.back();
}

std::vector<Complex> sample_backward_orbits(const Polynomial& p, Complex z, int steps, long count,
                                            std::uint64_t seed, int tasks) {
  if (tasks < 1) throw Error(ErrorCode::InvalidArgument, "tasks must be >= 1");
  std::vector<Complex> out(static_cast<std::size_t>(count));
  run_tasks(tasks, [&](int t) {
    Engine engine(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const auto [begin, end] = task_range(count, tasks, t);
    for (long s = begin; s < end; ++s) {
      Complex w = z;
      for (int k = 0; k < steps; ++k) w = random_preimage(p, w, engine);
      out[static_cast<std::size_t>(s)] = w;
    }
  });
  return out;
}

PointCloud julia_cloud(const Polynomial& p, Complex z, int depth, long budget, std::uint64_t seed,
                       const CloudOptions& options) {
  if (budget < 1) throw Error(ErrorCode::InvalidArgument, "budget must be >= 1");
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  if (exceptional_set(p).contains(z)) {
    throw Error(ErrorCode::ExceptionalBasepoint, format_complex(z) + " is exceptional");
  }
  const int d = p.degree();
  PointCloud cloud;
  if (bounded_power(d, depth, budget) <= budget) {
    cloud.points = {z};
    cloud.weights = {1.0};
    for (int level = 0; level < depth; ++level) {
      PointCloud next;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const RootSet pre = preimages(p, cloud.points[i]);
        for (std::size_t k = 0; k < pre.size(); ++k) {
          next.points.push_back(pre.roots[k]);
          next.weights.push_back(cloud.weights[i] * pre.multiplicities[k] / d);
        }
      }
      cloud = std::move(next);
    }
    return cloud;
  }
  cloud.points = sample_backward_orbits(p, z, options.burn_in + depth, budget, seed, options.tasks);
  cloud.weights.assign(cloud.points.size(), 1.0 / static_cast<double>(budget));
  return cloud;
}

}  // namespace cdyn
