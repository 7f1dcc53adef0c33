#include "cdyn/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <sstream>

#include "cdyn/error.hpp"

namespace cdyn {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Offset angle that keeps the starting circle off symmetry axes of z^d - c.
constexpr double kStartAngle = 0.7071067811865476;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

void polish_multiple_roots(const Polynomial& p, RootSet& roots, const std::vector<double>& radii) {
  double spread = 0.0;
  for (double r : radii)
    if (std::isfinite(r)) spread = std::max(spread, r);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const int k = roots.multiplicities[i];
    if (k < 2 || k > p.degree()) continue;
    // A k-fold root of p is a simple root of p^(k-1).
    Polynomial g = p;
    for (int j = 0; j < k - 1; ++j) g = derivative(g);
    const Polynomial dg = derivative(g);
    Complex z = roots.roots[i];
    for (int it = 0; it < 8; ++it) {
      const Complex slope = dg(z);
      if (slope == Complex{}) break;
      const Complex step = g(z) / slope;
      if (!finite(step)) break;
      z -= step;
      if (std::abs(step) <= 2.0 * kEps * std::abs(z)) break;
    }
    const double allowed = std::max(1e-6 * (1.0 + std::abs(roots.roots[i])), 4.0 * spread);
    if (finite(z) && std::abs(z - roots.roots[i]) <= allowed) {
      roots.roots[i] = z;
      roots.residuals[i] = std::abs(p(z));
    }
  }
}

int RootSet::total_multiplicity() const noexcept {
  return std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
}

double RootSet::max_residual() const noexcept {
  double r = 0.0;
  for (double x : residuals) r = std::max(r, x);
  return r;
}

RootSet solve_simultaneous(int degree, const Evaluator& f, double radius, double scale,
                           const SolverOptions& options) {
  if (degree < 1) throw Error(ErrorCode::DegreeZero, "no roots to find");
  std::vector<Complex> z(static_cast<std::size_t>(degree));
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / degree + kStartAngle;
    z[k] = std::polar(radius, angle);
  }
  return solve_simultaneous(std::move(z), f, scale, options);
}

RootSet solve_simultaneous(std::vector<Complex> z, const Evaluator& f, double scale,
                           const SolverOptions& options) {
  if (z.empty()) throw Error(ErrorCode::DegreeZero, "no roots to find");
  const std::size_t n = z.size();
  const int degree = static_cast<int>(n);
  std::vector<bool> done(n, false);
  std::size_t remaining = n;

  for (int iter = 0; iter < options.max_iter && remaining > 0; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const Evaluation e = f(z[i]);
      if (std::abs(e.value) <= e.error_bound) {
        done[i] = true;
        --remaining;
        continue;
      }
      Complex newton;
      if (!finite(e.value) || !finite(e.derivative) || !finite(e.value / e.derivative)) {
        // Far outside: behave like z^degree.
        newton = z[i] / static_cast<double>(degree);
      } else if (e.derivative == Complex{}) {
        newton = Complex(1e-3 * (1.0 + std::abs(z[i])), 0.0);
      } else {
        newton = e.value / e.derivative;
      }
      Complex repulsion{};
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const Complex diff = z[i] - z[j];
        if (diff != Complex{}) repulsion += 1.0 / diff;
      }
      Complex step = newton / (1.0 - newton * repulsion);
      if (!finite(step)) step = newton;
      z[i] -= step;
      if (std::abs(step) <= 2.0 * kEps * std::abs(z[i])) {
        done[i] = true;
        --remaining;
      }
    }
  }

  RootSet out;
  out.roots = z;
  out.multiplicities.assign(n, 1);
  out.residuals.resize(n);
  double worst = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Evaluation e = f(z[i]);
    out.residuals[i] = std::abs(e.value);
    const double accept = std::max(options.tol * scale, 2.0 * e.error_bound);
    if (!(out.residuals[i] <= accept)) {
      ok = false;
      worst = std::max(worst, out.residuals[i]);
    }
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "simultaneous iteration did not converge in " << options.max_iter
        << " sweeps; worst residual " << worst << " (scale " << scale << ")";
    throw Error(ErrorCode::NonConvergence, msg.str());
  }
  return out;
}

RootSet all_roots(const Polynomial& p, double tol, int max_iter) {
  const int d = p.degree();
  if (d < 1) throw Error(ErrorCode::DegreeZero, "constant polynomial has no roots");
  const Complex lead = p.leading();
  double bound = 0.0;
  for (int k = 0; k < d; ++k) bound = std::max(bound, std::abs(p[k] / lead));
  const auto coeffs = p.coeffs();
  Evaluator f = [&p, coeffs](Complex z) {
    Evaluation e;
    p.eval_with_derivative(z, e.value, e.derivative);
    // Running rounding bound of Horner's scheme.
    const double az = std::abs(z);
    double mag = std::abs(coeffs.back());
    for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) mag = mag * az + std::abs(*it);
    e.error_bound = 4.0 * kEps * mag * static_cast<double>(coeffs.size());
    return e;
  };
  return solve_simultaneous(d, f, 1.0 + bound, p.scale(), SolverOptions{tol, max_iter});
}

RootSet cluster(const RootSet& roots, double eps) {
  return cluster_inclusion(roots, std::vector<double>(roots.size(), 0.0), eps);
}

RootSet cluster_inclusion(const RootSet& roots, const std::vector<double>& radii, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "cluster eps must be positive");
  const std::size_t n = roots.size();
  double max_radius = 0.0;
  for (double r : radii) max_radius = std::max(max_radius, r);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return roots.roots[a].real() < roots.roots[b].real(); });
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const Complex za = roots.roots[order[a]], zb = roots.roots[order[b]];
      if (zb.real() - za.real() > std::max(eps, 2.0 * max_radius)) break;
      const double gap = std::abs(za - zb);
      if (gap <= eps || gap <= radii[order[a]] + radii[order[b]]) parent[find(order[a])] = find(order[b]);
    }
  }
  // Emit clusters in order of their first member to keep output stable.
  std::vector<long> slot(n, -1);
  RootSet out;
  std::vector<Complex> weighted;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    const int m = roots.multiplicities[i];
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(out.roots.size());
      out.roots.push_back(Complex{});
      weighted.push_back(Complex{});
      out.multiplicities.push_back(0);
      out.residuals.push_back(0.0);
    }
    const auto s = static_cast<std::size_t>(slot[r]);
    weighted[s] += static_cast<double>(m) * roots.roots[i];
    out.multiplicities[s] += m;
    out.residuals[s] = std::max(out.residuals[s], roots.residuals[i]);
  }
  for (std::size_t s = 0; s < out.roots.size(); ++s)
    out.roots[s] = weighted[s] / static_cast<double>(out.multiplicities[s]);
  return out;
}

RootSet preimages(const Polynomial& p, Complex w, double tol, int max_iter) {
  const Polynomial shifted = p - Polynomial({w});
  if (shifted.degree() < 1) throw Error(ErrorCode::DegreeZero, "constant polynomial has no preimages");
  if (shifted.degree() == 1) {
    RootSet r;
    r.roots = {-shifted[0] / shifted[1]};
    r.multiplicities = {1};
    r.residuals = {std::abs(shifted(r.roots[0]))};
    return r;
  }
  const RootSet raw = all_roots(shifted, tol, max_iter);
  const Polynomial ds = derivative(shifted);
  std::vector<double> radii(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double slope = std::abs(ds(raw.roots[i]));
    radii[i] = slope > 0.0 ? shifted.degree() * raw.residuals[i] / slope : kInf;
  }
  RootSet merged = cluster_inclusion(raw, radii, preimage_cluster_eps(w));
  polish_multiple_roots(shifted, merged, radii);
  return merged;
}

}  // namespace cdyn
