#include "cdyn/linearize.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "cdyn/error.hpp"

namespace cdyn {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kResidualCeiling = 1e-6;

Complex unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Largest r on the grid r_j = 1e-6 * 1.25^j (up to r_cap) such that the
// residual stays below 1e-6 for every grid radius up to r.
template <class F>
double scan_radius(F residual_at, double r_cap) {
  double last = 0.0;
  for (double r = 1e-6; r <= r_cap; r *= 1.25) {
    const double res = residual_at(r);
    if (!(res < kResidualCeiling)) break;
    last = r;
  }
  return last;
}

double radius_cap(const Polynomial& p) {
  return p.degree() >= 2 ? 2.0 * escape_radius(p) : 1e3;
}

// P(w + z0) - z0 with the constant and linear terms as given.
Polynomial translate(const Polynomial& p, Complex z0) {
  return conjugate_affine(p, AffineMap{Complex(1.0), -z0});
}

}  // namespace

Linearization koenigs(const Polynomial& p, Complex z0, int order, const LinearizeOptions& opts) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "series order must be >= 1");
  if (std::abs(p(z0) - z0) > 1e-8 * (1.0 + std::abs(z0)))
    throw Error(ErrorCode::InvalidArgument, "z0 is not a fixed point");
  const Polynomial q = translate(p, z0);
  const Complex lambda = q[1];
  const double m = std::abs(lambda);
  if (m == 0.0 || std::abs(m - 1.0) <= opts.neutral_tol)
    throw Error(ErrorCode::NotAttracting, "multiplier " + format_complex(lambda) +
                                              " is zero or neutral");

  PowerSeries qs = PowerSeries::from_polynomial(q, order);
  qs[0] = 0.0;
  std::vector<PowerSeries> powers{PowerSeries(order), qs};
  powers[0][0] = 1.0;
  for (int j = 2; j <= order; ++j) powers.push_back(powers.back() * qs);

  Linearization out;
  out.center = z0;
  out.multiplier = lambda;
  out.series = PowerSeries::identity(order);
  out.denominators_min = std::numeric_limits<double>::infinity();
  Complex lam_k = lambda;
  for (int k = 2; k <= order; ++k) {
    lam_k *= lambda;
    const Complex denom = lambda - lam_k;
    out.denominators.push_back(std::abs(denom));
    out.denominators_min = std::min(out.denominators_min, std::abs(denom));
    if (std::abs(denom) < opts.resonance_floor)
      throw Error(ErrorCode::ResonantMultiplier, "lambda^" + std::to_string(k) + " = lambda");
    Complex acc{};
    for (int j = 1; j < k; ++j) acc += out.series[j] * powers[static_cast<std::size_t>(j)][k];
    out.series[k] = acc / denom;
  }

  const double hint = scan_radius(
      [&](double r) { return koenigs_residual(p, out, r, opts.residual_samples); }, radius_cap(p));
  out.series.set_radius_hint(hint);
  out.residual_radius = 0.1 * hint;
  out.residual = koenigs_residual(p, out, out.residual_radius, opts.residual_samples);
  return out;
}

double koenigs_residual(const Polynomial& p, const Linearization& lin, double r, int samples) {
  double worst = 0.0;
  for (int j = 0; j < samples; ++j) {
    const Complex w = r * unit(2.0 * kPi * (j + 0.5) / samples);
    const Complex z = lin.center + w;
    const Complex lhs = lin.series(p(z) - lin.center);
    worst = std::max(worst, std::abs(lhs - lin.multiplier * lin.series(w)));
  }
  return worst;
}

GreenValue green_function(const Polynomial& p, Complex z, int n_max) {
  const int d = p.degree();
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "green function needs degree >= 2");
  const double bailout = std::max(1e16, 1e8 * escape_radius(p));
  const double shift = std::log(std::abs(p.leading())) / (d - 1);
  GreenValue g;
  double scale = 1.0;  // d^{-n}
  for (int n = 0; n <= n_max; ++n) {
    if (std::abs(z) > bailout) {
      g.value = scale * (std::log(std::abs(z)) + shift);
      g.escaped = true;
      g.steps = n;
      return g;
    }
    if (n == n_max) break;
    const Complex next = p(z);
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) {
      g.value = scale * (std::log(std::abs(z)) + shift);
      g.escaped = true;
      g.steps = n;
      return g;
    }
    z = next;
    scale /= d;
  }
  g.steps = n_max;
  return g;
}

Linearization boettcher_series(const Polynomial& p, Complex z0, int order,
                               const LinearizeOptions& opts) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "series order must be >= 1");
  const double scale = 1.0 + std::abs(z0);
  if (std::abs(p(z0) - z0) > 1e-8 * scale)
    throw Error(ErrorCode::InvalidArgument, "z0 is not a fixed point");
  Polynomial q = translate(p, z0);
  if (std::abs(q[1]) > 1e-10 * scale)
    throw Error(ErrorCode::NotSuperattracting, "P'(z0) = " + format_complex(q[1]));
  int local = 2;
  while (local <= q.degree() && std::abs(q[local]) <= 1e-14) ++local;
  if (local > q.degree()) throw Error(ErrorCode::NotSuperattracting, "P is constant near z0");

  const Complex ap = q[local];
  const Complex gauge = local == 2 ? ap : std::exp(std::log(ap) / static_cast<double>(local - 1));
  // R(u) = c Q(u / c) is monic at order `local`.
  const int m = local + order - 1;
  PowerSeries rs(std::max(m, 1));
  for (int k = local; k <= std::min(q.degree(), m); ++k)
    rs[k] = q[k] * std::pow(gauge, 1 - k);
  rs[local] = 1.0;

  PowerSeries phi = PowerSeries::identity(m);
  for (int k = 2; k <= order; ++k) {
    const int target = local + k - 1;
    const Complex lhs = phi.compose(rs)[target];
    const Complex rhs = phi.pow(local)[target];
    phi[k] = (lhs - rhs) / static_cast<double>(local);
  }

  Linearization out;
  out.series = phi.truncated(order);
  out.center = z0;
  out.multiplier = 0.0;
  out.gauge = gauge;
  out.local_degree = local;
  out.denominators_min = static_cast<double>(local);
  const double hint = scan_radius(
      [&](double r) { return boettcher_residual(p, out, r, opts.residual_samples); },
      radius_cap(p));
  out.series.set_radius_hint(hint);
  out.residual_radius = 0.1 * hint;
  out.residual = boettcher_residual(p, out, out.residual_radius, opts.residual_samples);
  return out;
}

double boettcher_residual(const Polynomial& p, const Linearization& lin, double r, int samples) {
  double worst = 0.0;
  for (int j = 0; j < samples; ++j) {
    const Complex w = r * unit(2.0 * kPi * (j + 0.5) / samples);
    const Complex lhs = lin.series(lin.gauge * (p(lin.center + w) - lin.center));
    const Complex rhs = std::pow(lin.series(lin.gauge * w), lin.local_degree);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

Linearization siegel_series(Complex lambda, const Polynomial& p, int order, double residual_radius) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "series order must be >= 1");
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "|lambda| must be 1");
  if (std::abs(p[0]) > 1e-12 || std::abs(p[1] - lambda) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "need P(0) = 0 and P'(0) = lambda");
  const double angle = std::arg(lambda);

  Linearization out;
  out.center = 0.0;
  out.multiplier = lambda;
  out.denominators_min = std::numeric_limits<double>::infinity();
  PowerSeries h = PowerSeries::identity(order);
  for (int j = 2; j <= order; ++j) {
    const Complex denom = unit(angle * j) - lambda;
    const double size = std::abs(denom);
    out.denominators.push_back(size);
    out.denominators_min = std::min(out.denominators_min, size);
    if (size < 1e-14)
      throw Error(ErrorCode::SmallDenominator,
                  "|lambda^" + std::to_string(j) + " - lambda| below 1e-14");
    // Coefficient j of sum_{k>=2} p_k h^k; h_j is still zero here.
    Complex acc{};
    PowerSeries hk = h;
    for (int k = 2; k <= p.degree(); ++k) {
      hk = hk * h;
      acc += p[k] * hk[j];
    }
    h[j] = acc / denom;
  }
  out.series = h;
  const double hint = scan_radius([&](double r) { return siegel_residual(p, out, r); }, 1.0);
  out.series.set_radius_hint(hint);
  out.residual_radius = residual_radius;
  out.residual = siegel_residual(p, out, residual_radius);
  return out;
}

double siegel_residual(const Polynomial& p, const Linearization& lin, double r, int samples) {
  double worst = 0.0;
  for (int j = 0; j < samples; ++j) {
    const Complex z = r * unit(2.0 * kPi * (j + 0.5) / samples);
    worst = std::max(worst, std::abs(lin.series(lin.multiplier * z) - p(lin.series(z))));
  }
  return worst;
}

double golden_theta() { return (std::sqrt(5.0) - 1.0) / 2.0; }

double rotation_distance(double theta, long long n) {
  const long double x = static_cast<long double>(n) * static_cast<long double>(theta);
  const long double frac = x - std::round(x);
  return 2.0 * std::abs(std::sin(kPi * static_cast<double>(frac)));
}

DiophantineReport diophantine_check(double theta, const DiophantineParams& params) {
  DiophantineReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  for (long long n = 1; n <= params.n_max; ++n) {
    const double v = rotation_distance(theta, n) * std::pow(static_cast<double>(n), params.mu);
    if (v < rep.margin) {
      rep.margin = v;
      rep.argmin = n;
    }
  }
  rep.pass = rep.margin >= params.c;
  return rep;
}

CremerReport cremer_theta(const std::vector<int>& q, int terms, const std::vector<int>& degrees) {
  if (terms < 1 || static_cast<std::size_t>(terms) > q.size())
    throw Error(ErrorCode::InvalidArgument, "need 1 <= L <= number of exponents");
  if (q[0] <= 1) throw Error(ErrorCode::InvalidArgument, "need 1 < q_1");
  for (int k = 1; k < terms; ++k)
    if (q[static_cast<std::size_t>(k)] <= q[static_cast<std::size_t>(k) - 1])
      throw Error(ErrorCode::InvalidArgument, "exponents must be strictly increasing");
  for (int d : degrees)
    if (d < 2) throw Error(ErrorCode::InvalidArgument, "degrees must be >= 2");

  CremerReport rep;
  for (int k = terms - 1; k >= 0; --k) rep.theta += std::ldexp(1.0, -q[static_cast<std::size_t>(k)]);
  const double max_log = std::log(DBL_MAX);
  for (int l = 0; l + 1 < terms; ++l) {
    const int ql = q[static_cast<std::size_t>(l)];
    // frac(2^{q_l} theta) is exactly the tail sum.
    double tail = 0.0;
    for (int k = terms - 1; k > l; --k) tail += std::ldexp(1.0, ql - q[static_cast<std::size_t>(k)]);
    CremerTerm t;
    t.ell = l + 1;
    t.distance = 2.0 * std::abs(std::sin(kPi * tail));
    t.bound = 4.0 * kPi * std::ldexp(1.0, ql - q[static_cast<std::size_t>(l) + 1]);
    t.certified = t.distance <= t.bound;
    for (int d : degrees) {
      CremerGrowth g;
      g.degree = d;
      g.lhs_log = std::log(t.bound);
      g.exponent_log = std::ldexp(1.0, ql) * std::log(static_cast<double>(d));
      g.representable = g.exponent_log < max_log;
      const double log_l = std::log(static_cast<double>(t.ell));
      if (t.ell == 1)
        g.rhs_log = 0.0;
      else
        g.rhs_log = g.representable ? -std::exp(g.exponent_log) * log_l
                                    : -std::numeric_limits<double>::infinity();
      g.holds = g.lhs_log < g.rhs_log;
      t.growth.push_back(g);
    }
    rep.terms.push_back(t);
  }
  return rep;
}

RadiusBound siegel_radius_bound(Complex lambda, int degree, int n_max) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "|lambda| must be 1");
  if (degree < 2) throw Error(ErrorCode::InvalidArgument, "degree must be >= 2");
  const double theta = std::arg(lambda) / (2.0 * kPi);
  RadiusBound rb;
  for (int n = 1; n <= n_max; ++n) {
    const double exponent = std::pow(static_cast<double>(degree), n) - 1.0;
    if (!std::isfinite(exponent)) break;
    const double dist = rotation_distance(theta, n);
    // Distances at rounding level are resonances.
    const double v = dist <= 64.0 * DBL_EPSILON * n ? 0.0 : std::exp(std::log(dist) / exponent);
    if (v < rb.r_max) {
      rb.r_max = v;
      rb.argmin = n;
    }
  }
  return rb;
}

KamSchedule kam_schedule(double eta0, double delta0, double c0, double mu, int steps, double r0) {
  if (!(r0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "r0 must be positive");
  if (steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 0");
  KamSchedule s;
  double r = r0, eta = eta0, delta = delta0;
  for (int n = 0; n <= steps; ++n) {
    s.r.push_back(r);
    s.eta.push_back(eta);
    s.delta.push_back(delta);
    const bool ok = eta > 0.0 && eta < 0.2 && delta < eta && c0 * delta < std::pow(eta, mu + 2.0);
    s.valid.push_back(ok);
    s.all_valid = s.all_valid && ok;
    const double next_delta = c0 * delta * delta * std::pow(eta, -mu - 2.0) * std::pow(2.0, -mu - 2.0);
    r *= 1.0 - 5.0 * eta;
    eta /= 2.0;
    delta = next_delta;
  }
  // Continue the product and sum until eta underflows relative to 1.
  double ratio = 1.0, sum = 0.0;
  for (double e = eta0; e > 1e-20; e /= 2.0) {
    ratio *= std::max(0.0, 1.0 - 5.0 * e);
    sum += e;
  }
  s.radius_ratio = ratio;
  s.eta_sum = sum;
  return s;
}

Complex fatou_conjugate(const Polynomial& p, Complex w) { return -1.0 / p(-1.0 / w); }

PowerSeries sector_map(const Polynomial& p, int k, int order) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  // P(z)/z = g(z^k) is required.
  std::vector<Complex> g;
  for (int j = 1; j <= p.degree(); ++j) {
    const int e = j - 1;
    if (e % k != 0) {
      if (std::abs(p[j]) > 1e-14)
        throw Error(ErrorCode::InvalidArgument, "P(z)/z is not a series in z^k");
      continue;
    }
    g.resize(static_cast<std::size_t>(e / k) + 1);
    g[static_cast<std::size_t>(e / k)] = p[j];
  }
  PowerSeries gs(std::max(order, 1));
  for (std::size_t i = 0; i < g.size() && static_cast<int>(i) <= order; ++i) gs[static_cast<int>(i)] = g[i];
  PowerSeries w = PowerSeries::identity(std::max(order, 1));
  return w * gs.pow(k);
}

PetalReport parabolic_petal(const Polynomial& p, int k, const PetalOptions& opts) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (std::abs(p[0]) > 1e-12) throw Error(ErrorCode::InvalidArgument, "need P(0) = 0");
  if (std::abs(p[1] - 1.0) > 1e-10)
    throw Error(ErrorCode::NotTangentToIdentity, "P'(0) = " + format_complex(p[1]));
  for (int j = 2; j <= k; ++j)
    if (std::abs(p[j]) > 1e-12)
      throw Error(ErrorCode::WrongOrder, "nonzero z^" + std::to_string(j) + " term below order k+1");
  if (std::abs(p[k + 1]) <= 1e-12)
    throw Error(ErrorCode::WrongOrder, "z^" + std::to_string(k + 1) + " coefficient vanishes");

  PetalReport rep;
  rep.order = k;
  rep.leading = p[k + 1];
  rep.epsilon = opts.epsilon;
  rep.boundary_samples = opts.samples;
  if (k == 1) {
    rep.normalized = conjugate_affine(p, AffineMap{rep.leading, 0.0});
  } else {
    try {
      const int deg = p.degree();
      const PowerSeries w = sector_map(p, k, deg);
      std::vector<Complex> c(w.coeffs().begin(), w.coeffs().end());
      rep.normalized = conjugate_affine(Polynomial(c), AffineMap{static_cast<double>(k) * rep.leading, 0.0});
    } catch (const Error&) {
      rep.sector_exact = false;
      return rep;
    }
  }
  const Polynomial& f = rep.normalized;
  const double eps = opts.epsilon;

  double worst = 0.0;
  for (int j = 0; j < opts.samples; ++j) {
    const Complex z = -eps + eps * unit(2.0 * kPi * (j + 0.5) / opts.samples);
    const double re = (-1.0 / f(z)).real();
    worst = re > 0.0 ? std::max(worst, 1.0 / (2.0 * re)) : std::numeric_limits<double>::infinity();
  }
  rep.epsilon_image = worst;
  rep.boundary_inside = worst <= eps;

  Complex z = -eps;
  long long n = 0;
  while (std::abs(z) >= opts.target && n < opts.max_steps) {
    z = f(z);
    ++n;
  }
  rep.orbit_steps = n;
  rep.orbit_converged = std::abs(z) < opts.target;

  bool decreasing = true;
  for (double w : {1e1, 1e2, 1e3, 1e4}) {
    const double dev = std::abs(fatou_conjugate(f, w) - (w + 1.0));
    if (!rep.fatou.empty() && dev >= rep.fatou.back().deviation) decreasing = false;
    rep.fatou.push_back({w, dev});
  }
  rep.verified = rep.boundary_inside && rep.orbit_converged && decreasing;
  return rep;
}

}  // namespace cdyn
