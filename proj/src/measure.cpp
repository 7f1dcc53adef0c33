#include "cdyn/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "cdyn/error.hpp"
#include "cdyn/orbits.hpp"
#include "cdyn/roots.hpp"
#include "cdyn/sampling.hpp"

namespace cdyn {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Spatial hash over finite atoms. Cells have side rel_tol (1 + max|z|), which
// is at least every atom's own matching radius, so a 3x3 neighbourhood suffices.
class AtomIndex {
 public:
  AtomIndex(double rel_tol, double max_abs) : rel_tol_(rel_tol), cell_(rel_tol * (1.0 + max_abs)) {}

  /// Index of a stored point within tolerance of z, or -1.
  long find(Complex z) const {
    const auto [cx, cy] = key(z);
    const double tol = rel_tol_ * (1.0 + std::abs(z));
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(pack(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (long idx : it->second)
          if (std::abs(points_[static_cast<std::size_t>(idx)] - z) <= tol) return idx;
      }
    return -1;
  }

  long insert(Complex z) {
    const auto [cx, cy] = key(z);
    const long idx = static_cast<long>(points_.size());
    points_.push_back(z);
    cells_[pack(cx, cy)].push_back(idx);
    return idx;
  }

  long find_or_insert(Complex z) {
    const long idx = find(z);
    return idx >= 0 ? idx : insert(z);
  }

  Complex point(long idx) const { return points_[static_cast<std::size_t>(idx)]; }

 private:
  std::pair<long long, long long> key(Complex z) const {
    return {static_cast<long long>(std::floor(z.real() / cell_)),
            static_cast<long long>(std::floor(z.imag() / cell_))};
  }
  static std::uint64_t pack(long long x, long long y) {
    return static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(y);
  }

  double rel_tol_;
  double cell_;
  std::vector<Complex> points_;
  std::unordered_map<std::uint64_t, std::vector<long>> cells_;
};

double max_finite_abs(const std::vector<const EmpiricalMeasure*>& ms) {
  double m = 0.0;
  for (const auto* mu : ms)
    for (const Atom& a : mu->atoms())
      if (a.point.is_finite()) m = std::max(m, std::abs(a.point.value()));
  return m;
}

// Paired weights of two measures over a common atom index; slot 0 is infinity.
std::vector<std::pair<double, double>> pair_weights(const EmpiricalMeasure& a,
                                                    const EmpiricalMeasure& b, double rel_tol) {
  AtomIndex index(rel_tol, max_finite_abs({&a, &b}));
  std::vector<std::pair<double, double>> w(1);
  auto slot = [&](const SpherePoint& p) -> std::size_t {
    if (p.is_infinite()) return 0;
    const long idx = index.find_or_insert(p.value());
    if (static_cast<std::size_t>(idx) + 1 >= w.size()) w.resize(static_cast<std::size_t>(idx) + 2);
    return static_cast<std::size_t>(idx) + 1;
  };
  for (const Atom& at : a.atoms()) w[slot(at.point)].first += at.weight;
  for (const Atom& at : b.atoms()) w[slot(at.point)].second += at.weight;
  return w;
}

Complex checked(const TestFunction& phi, const SpherePoint& p) {
  const Complex v = phi(p);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error(ErrorCode::UndefinedAtAtom, phi.label + " is not finite at an atom");
  return v;
}

void require_finite_basepoint(const Polynomial& p, Complex x) {
  if (exceptional_set(p).contains(x))
    throw Error(ErrorCode::ExceptionalBasepoint, format_complex(x) + " is exceptional");
}

}  // namespace

double EmpiricalMeasure::mass() const noexcept {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight;
  return s;
}

EmpiricalMeasure EmpiricalMeasure::scaled(double factor) const {
  EmpiricalMeasure out = *this;
  for (Atom& a : out.atoms_) a.weight *= factor;
  return out;
}

EmpiricalMeasure EmpiricalMeasure::merged(double rel_tol) const {
  AtomIndex index(rel_tol, max_finite_abs({this}));
  std::vector<double> weights;
  double at_inf = 0.0;
  bool has_inf = false;
  for (const Atom& a : atoms_) {
    if (a.point.is_infinite()) {
      at_inf += a.weight;
      has_inf = true;
      continue;
    }
    const long idx = index.find_or_insert(a.point.value());
    if (static_cast<std::size_t>(idx) >= weights.size()) weights.push_back(0.0);
    weights[static_cast<std::size_t>(idx)] += a.weight;
  }
  EmpiricalMeasure out;
  for (std::size_t i = 0; i < weights.size(); ++i)
    out.add(index.point(static_cast<long>(i)), weights[i]);
  if (has_inf) out.add(SpherePoint::infinity(), at_inf);
  return out;
}

EmpiricalMeasure EmpiricalMeasure::normalized() const {
  const double m = mass();
  if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero measure");
  return scaled(1.0 / m).merged();
}

EmpiricalMeasure EmpiricalMeasure::mixed(const EmpiricalMeasure& other, double t) const {
  EmpiricalMeasure out = scaled(1.0 - t);
  for (const Atom& a : other.atoms_) out.add(a.point, a.weight * t);
  return out;
}

double total_variation(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double rel_tol) {
  double tv = 0.0;
  for (const auto& [wa, wb] : pair_weights(a, b, rel_tol)) tv += std::abs(wa - wb);
  return tv;
}

bool same_measure(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double rel_tol,
                  double weight_tol) {
  for (const auto& [wa, wb] : pair_weights(a, b, rel_tol))
    if (std::abs(wa - wb) > weight_tol) return false;
  return true;
}

std::string measure_csv(const EmpiricalMeasure& m) {
  std::string out = "re,im,weight\n";
  char buf[128];
  for (const Atom& a : m.atoms()) {
    if (a.point.is_infinite())
      std::snprintf(buf, sizeof buf, "inf,inf,%.17g\n", a.weight);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", a.point.value().real(),
                    a.point.value().imag(), a.weight);
    out += buf;
  }
  return out;
}

TestFunction finite_function(std::string label, std::function<Complex(Complex)> f) {
  return {[f](const SpherePoint& p) {
            if (p.is_infinite()) return Complex(kInf, 0.0);
            return f(p.value());
          },
          std::move(label)};
}

TestFunction finite_function(std::string label, std::function<Complex(Complex)> f,
                             Complex at_infinity) {
  return {[f, at_infinity](const SpherePoint& p) {
            return p.is_infinite() ? at_infinity : f(p.value());
          },
          std::move(label)};
}

std::vector<TestFunction> default_panel() {
  return {
      finite_function("Re z", [](Complex z) { return Complex(z.real()); }),
      finite_function("Im z", [](Complex z) { return Complex(z.imag()); }),
      finite_function("|z|^2", [](Complex z) { return Complex(std::norm(z)); }),
      finite_function("1/(1+|z|^2)", [](Complex z) { return Complex(1.0 / (1.0 + std::norm(z))); },
                      0.0),
      finite_function("Re z^2", [](Complex z) { return Complex((z * z).real()); }),
      finite_function("Im z^2", [](Complex z) { return Complex((z * z).imag()); }),
  };
}

TestFunction upper_half_indicator() {
  return finite_function(
      "1{Im z > 0}", [](Complex z) { return Complex(z.imag() > 0.0 ? 1.0 : 0.0); }, 0.0);
}

EmpiricalMeasure pullback(const Polynomial& p, const EmpiricalMeasure& nu) {
  const int d = p.degree();
  if (d < 1) throw Error(ErrorCode::DegreeZero, "pullback needs degree >= 1");
  EmpiricalMeasure out;
  for (const Atom& a : nu.atoms()) {
    if (a.point.is_infinite()) {
      out.add(a.point, a.weight * d);
      continue;
    }
    const RootSet pre = preimages(p, a.point.value());
    for (std::size_t k = 0; k < pre.size(); ++k)
      out.add(pre.roots[k], a.weight * pre.multiplicities[k]);
  }
  return out;
}

EmpiricalMeasure normalized_pullback(const Polynomial& p, const EmpiricalMeasure& nu, int n) {
  EmpiricalMeasure m = nu.merged();
  for (int k = 0; k < n; ++k) m = pullback(p, m).scaled(1.0 / p.degree()).merged();
  return m;
}

bool exact_mode(const Polynomial& p, int n, long budget) {
  return bounded_power(p.degree(), n, budget) <= budget;
}

EmpiricalMeasure mu_nx(const Polynomial& p, const SpherePoint& x, int n, std::uint64_t seed,
                       const MeasureOptions& opts) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be >= 0");
  if (opts.budget < 1) throw Error(ErrorCode::InvalidArgument, "budget must be >= 1");
  if (p.degree() < 2) throw Error(ErrorCode::InvalidArgument, "degree must be >= 2");
  if (x.is_infinite()) return EmpiricalMeasure::dirac(x);
  if (exact_mode(p, n, opts.budget)) return normalized_pullback(p, EmpiricalMeasure::dirac(x), n);
  const std::vector<Complex> pts =
      sample_backward_orbits(p, x.value(), n, opts.budget, seed, opts.tasks);
  EmpiricalMeasure m;
  const double w = 1.0 / static_cast<double>(pts.size());
  for (Complex z : pts) m.add(z, w);
  return m;
}

std::vector<EmpiricalMeasure> cesaro_sequence(const Polynomial& p, const SpherePoint& x, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  std::vector<EmpiricalMeasure> out;
  EmpiricalMeasure level = EmpiricalMeasure::dirac(x);
  EmpiricalMeasure sum;
  for (int j = 1; j <= n; ++j) {
    level = pullback(p, level).scaled(1.0 / p.degree()).merged();
    // lambda_j = ((j - 1) lambda_{j-1} + mu_j) / j
    sum = sum.mixed(level, 1.0 / j).merged();
    out.push_back(sum);
  }
  return out;
}

EmpiricalMeasure cesaro(const Polynomial& p, const SpherePoint& x, int n, std::uint64_t seed,
                        const MeasureOptions& opts) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  if (exact_mode(p, n, opts.budget)) return cesaro_sequence(p, x, n).back();
  EmpiricalMeasure sum;
  for (int j = 1; j <= n; ++j) {
    const EmpiricalMeasure level = mu_nx(p, x, j, derive_seed(seed, static_cast<std::uint64_t>(j)), opts);
    sum = sum.mixed(level, 1.0 / j);
  }
  return sum.merged();
}

Complex integrate(const EmpiricalMeasure& mu, const TestFunction& phi) {
  Complex s{};
  for (const Atom& a : mu.atoms()) s += a.weight * checked(phi, a.point);
  return s;
}

TestFunction pushforward_fn(const Polynomial& p, const TestFunction& phi) {
  return {[p, phi](const SpherePoint& z) -> Complex {
            if (z.is_infinite()) return static_cast<double>(p.degree()) * phi(z);
            const RootSet pre = preimages(p, z.value());
            Complex s{};
            for (std::size_t k = 0; k < pre.size(); ++k)
              s += static_cast<double>(pre.multiplicities[k]) * phi(pre.roots[k]);
            return s;
          },
          "P_*(" + phi.label + ")"};
}

double duality_residual(const Polynomial& p, const TestFunction& phi, const EmpiricalMeasure& nu) {
  return std::abs(integrate(pullback(p, nu), phi) - integrate(nu, pushforward_fn(p, phi)));
}

double panel_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                      const std::vector<TestFunction>& panel) {
  double worst = 0.0;
  for (const TestFunction& phi : panel)
    worst = std::max(worst, std::abs(integrate(a, phi) - integrate(b, phi)));
  return worst;
}

GapReport weak_gap(const Polynomial& p, Complex x, Complex y, int n,
                   const std::vector<TestFunction>& panel, std::uint64_t seed,
                   const MeasureOptions& opts) {
  require_finite_basepoint(p, x);
  require_finite_basepoint(p, y);
  GapReport rep;
  rep.exact = exact_mode(p, n, opts.budget);
  const EmpiricalMeasure mx = mu_nx(p, x, n, derive_seed(seed, 0), opts);
  const EmpiricalMeasure my = mu_nx(p, y, n, derive_seed(seed, 1), opts);
  auto variance = [](const EmpiricalMeasure& m, const TestFunction& phi, Complex mean) {
    double v = 0.0;
    for (const Atom& a : m.atoms()) v += a.weight * std::norm(phi(a.point) - mean);
    return v;
  };
  for (const TestFunction& phi : panel) {
    PanelEntry e;
    e.label = phi.label;
    e.at_x = integrate(mx, phi);
    e.at_y = integrate(my, phi);
    e.diff = std::abs(e.at_x - e.at_y);
    if (!rep.exact)
      e.std_error = std::sqrt(variance(mx, phi, e.at_x) / static_cast<double>(mx.size()) +
                              variance(my, phi, e.at_y) / static_cast<double>(my.size()));
    if (rep.entries.empty() || e.diff > rep.gap) {
      rep.gap = e.diff;
      rep.std_error = e.std_error;
    }
    rep.entries.push_back(e);
  }
  return rep;
}

Complex joint_integral(const Polynomial& p, const TestFunction& phi, const TestFunction& psi,
                       int n, const EmpiricalMeasure& mu) {
  Complex s{};
  for (const Atom& a : mu.atoms()) {
    const SpherePoint image = a.point.is_infinite() ? a.point : iterate(p, a.point, n);
    s += a.weight * checked(phi, a.point) * checked(psi, image);
  }
  return s;
}

Complex mixing_correlation(const Polynomial& p, const TestFunction& phi, const TestFunction& psi,
                           int n, const EmpiricalMeasure& mu) {
  return joint_integral(p, phi, psi, n, mu) - integrate(mu, phi) * integrate(mu, psi);
}

ErgodicityReport ergodicity_check(const Polynomial& p, const TestFunction& indicator,
                                  const EmpiricalMeasure& mu, const std::vector<int>& schedule,
                                  double tol) {
  for (const Atom& a : mu.atoms()) {
    const Complex v = checked(indicator, a.point);
    if (v.imag() != 0.0 || (v.real() != 0.0 && v.real() != 1.0))
      throw Error(ErrorCode::InvalidArgument, indicator.label + " is not {0,1}-valued");
  }
  ErgodicityReport rep;
  rep.mass = integrate(mu, indicator).real();
  for (const Atom& a : mu.atoms()) {
    const SpherePoint image = a.point.is_infinite() ? a.point : iterate(p, a.point, 1);
    rep.invariance_defect += a.weight * std::abs(indicator(a.point) - indicator(image));
  }
  rep.invariant = rep.invariance_defect < tol;
  rep.consistent = !rep.invariant || rep.mass < tol || rep.mass > 1.0 - tol;
  for (int n : schedule)
    rep.steps.push_back({n, joint_integral(p, indicator, indicator, n, mu).real()});
  if (!rep.steps.empty()) rep.mixing_gap = std::abs(rep.steps.back().joint - rep.mass * rep.mass);
  return rep;
}

std::vector<Complex> postcritical_points(const Polynomial& p, int ell) {
  const Polynomial dp = derivative(p);
  std::vector<Complex> out;
  if (dp.degree() < 1) return out;
  const double radius = escape_radius(p);
  const RootSet crit = preimages(dp, 0.0);
  for (Complex c : crit.roots) {
    Complex z = c;
    for (int q = 1; q <= ell; ++q) {
      z = p(z);
      if (!(std::abs(z) <= radius)) break;
      out.push_back(z);
    }
  }
  return out;
}

LyubichReport lyubich_diameters(const Polynomial& p, Complex center, double radius, int n_max,
                                long branches, std::uint64_t seed, const LyubichOptions& opts) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (n_max < 1 || branches < 1)
    throw Error(ErrorCode::InvalidArgument, "need n_max >= 1 and branches >= 1");
  if (opts.boundary_samples < 2) throw Error(ErrorCode::InvalidArgument, "need >= 2 boundary samples");
  for (Complex v : postcritical_points(p, opts.ell))
    if (std::abs(v - center) <= radius)
      throw Error(ErrorCode::PostcriticalOverlap,
                  "postcritical point " + format_complex(v) + " lies in the disc");
  const int d = p.degree();
  const int k_samples = opts.boundary_samples;
  // diam[b * (n_max + 1) + n]
  std::vector<double> diam(static_cast<std::size_t>(branches) * (n_max + 1));
  run_tasks(opts.tasks, [&](int t) {
    Engine engine(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const auto [begin, end] = task_range(branches, opts.tasks, t);
    std::vector<Complex> ring(static_cast<std::size_t>(k_samples));
    for (long b = begin; b < end; ++b) {
      Complex c = center;
      for (int j = 0; j < k_samples; ++j)
        ring[static_cast<std::size_t>(j)] = center + std::polar(radius, 2.0 * kPi * j / k_samples);
      double* row = &diam[static_cast<std::size_t>(b) * (n_max + 1)];
      row[0] = 2.0 * radius;
      for (int n = 1; n <= n_max; ++n) {
        c = random_preimage(p, c, engine);
        for (Complex& w : ring) {
          const RootSet pre = preimages(p, w);
          w = *std::min_element(pre.roots.begin(), pre.roots.end(), [c](Complex a, Complex b) {
            return std::abs(a - c) < std::abs(b - c);
          });
        }
        double dmax = 0.0;
        for (std::size_t i = 0; i < ring.size(); ++i)
          for (std::size_t j = i + 1; j < ring.size(); ++j) dmax = std::max(dmax, std::abs(ring[i] - ring[j]));
        row[n] = dmax;
      }
    }
  });

  LyubichReport rep;
  rep.branches = branches;
  rep.target_slope = -0.5 * std::log(static_cast<double>(d));
  auto at = [&](long b, int n) { return diam[static_cast<std::size_t>(b) * (n_max + 1) + n]; };

  std::vector<double> scaled;
  for (long b = 0; b < branches; ++b) scaled.push_back(at(b, 1) * std::pow(d, 0.5));
  std::sort(scaled.begin(), scaled.end());
  rep.fitted_c = scaled[static_cast<std::size_t>(std::ceil(0.9 * branches)) - 1];

  long below = 0, total = 0;
  std::vector<double> ns, means;
  for (int n = 0; n <= n_max; ++n) {
    LyubichLevel lv;
    lv.n = n;
    std::vector<double> ds;
    double sum = 0.0, sum2 = 0.0;
    long over = 0;
    const double threshold = rep.fitted_c * std::pow(d, -0.5 * n);
    for (long b = 0; b < branches; ++b) {
      const double v = at(b, n);
      ds.push_back(v);
      const double lg = std::log(v);
      sum += lg;
      sum2 += lg * lg;
      if (v > threshold) ++over;
    }
    const double N = static_cast<double>(branches);
    lv.mean_log_diameter = sum / N;
    lv.std_error = branches > 1 ? std::sqrt(std::max(0.0, sum2 / N - lv.mean_log_diameter * lv.mean_log_diameter) / (N - 1)) : 0.0;
    std::nth_element(ds.begin(), ds.begin() + static_cast<long>(ds.size() / 2), ds.end());
    lv.median_diameter = ds[ds.size() / 2];
    lv.fraction_exceeding = static_cast<double>(over) / N;
    if (n >= 1) {
      below += branches - over;
      total += branches;
      ns.push_back(n);
      means.push_back(lv.mean_log_diameter);
    }
    rep.levels.push_back(lv);
  }
  rep.fraction_below = static_cast<double>(below) / static_cast<double>(total);
  if (ns.size() >= 2) {
    const double mx = std::accumulate(ns.begin(), ns.end(), 0.0) / ns.size();
    const double my = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      sxy += (ns[i] - mx) * (means[i] - my);
      sxx += (ns[i] - mx) * (ns[i] - mx);
    }
    rep.slope = sxy / sxx;
    rep.intercept = my - rep.slope * mx;
  } else {
    rep.slope = means.empty() ? 0.0 : means[0] - std::log(2.0 * radius);
    rep.intercept = std::log(2.0 * radius);
  }
  return rep;
}

}  // namespace cdyn
