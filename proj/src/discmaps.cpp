#include "cdyn/discmaps.hpp"

#include <algorithm>
#include <cmath>

#include "cdyn/error.hpp"

namespace cdyn {
namespace {

constexpr double kPi = 3.14159265358979323846;

void require_in_disc(Complex z) {
  if (!(std::abs(z) < 1.0))
    throw Error(ErrorCode::OutsideDisc, format_complex(z) + " is not in the open unit disc");
}

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = 0.5 * (1.0 - t);
    w[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

std::vector<Complex> polar_grid() {
  std::vector<Complex> pts;
  for (int i = 1; i <= 25; ++i) {
    const double r = 0.95 * i / 25.0;
    for (int j = 0; j < 40; ++j) pts.push_back(std::polar(r, 2.0 * kPi * (j + 0.5 * (i % 2)) / 40.0));
  }
  return pts;
}

}  // namespace

double poincare_distance(Complex z, Complex w) {
  require_in_disc(z);
  require_in_disc(w);
  return std::atanh(std::abs((z - w) / (1.0 - std::conj(z) * w)));
}

void validate_self_map(const DiscMap& f, int samples) {
  for (int j = 0; j < samples; ++j) {
    const Complex u = std::polar(1.0, 2.0 * kPi * j / samples);
    const double inner = std::abs(f(u * (1.0 - 1e-3)));
    const double outer = std::abs(f(u));
    if (!(inner < 1.0) || !(outer <= 1.0 + 1e-12))
      throw Error(ErrorCode::NotASelfMap,
                  f.label + " leaves the unit disc near " + format_complex(u));
  }
}

DiscMap blaschke(const std::vector<Complex>& zeros, Complex rotation) {
  if (std::abs(std::abs(rotation) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "rotation must be unimodular");
  for (Complex a : zeros) require_in_disc(a);
  DiscMap f;
  f.eval = [zeros, rotation](Complex z) {
    Complex v = rotation;
    for (Complex a : zeros) v *= (z - a) / (1.0 - std::conj(a) * z);
    return v;
  };
  f.kind = DiscMapKind::Blaschke;
  f.label = "blaschke";
  f.automorphism = zeros.size() == 1;
  return f;
}

DiscMap mobius(Complex t, Complex rotation) {
  DiscMap f = blaschke({-t}, rotation);
  f.label = "mobius(" + format_complex(t) + ")";
  return f;
}

DiscMap polynomial_map(const Polynomial& p) {
  DiscMap f;
  f.eval = [p](Complex z) { return p(z); };
  f.kind = DiscMapKind::Polynomial;
  f.label = format_polynomial(p);
  // Rotations are the only polynomial automorphisms.
  f.automorphism = p.degree() == 1 && std::abs(p[0]) == 0.0 && std::abs(std::abs(p[1]) - 1.0) < 1e-12;
  validate_self_map(f);
  return f;
}

DiscMap series_map(const PowerSeries& s) {
  DiscMap f;
  f.eval = [s](Complex z) { return s(z); };
  f.kind = DiscMapKind::Series;
  f.label = "series";
  validate_self_map(f);
  return f;
}

SchwarzPick schwarz_pick(const DiscMap& f, Complex z, Complex w) {
  if (z == w) throw Error(ErrorCode::InvalidArgument, "schwarz_pick needs z != w");
  const double base = poincare_distance(z, w);
  SchwarzPick sp;
  sp.ratio = poincare_distance(f(z), f(w)) / base;
  sp.pass = sp.ratio <= 1.0 + 1e-10;
  return sp;
}

std::string to_string(DenjoyWolffKind k) {
  switch (k) {
    case DenjoyWolffKind::InteriorFixed: return "InteriorFixed";
    case DenjoyWolffKind::BoundaryPoint: return "BoundaryPoint";
    case DenjoyWolffKind::Undecided: return "Undecided";
  }
  return "Undecided";
}

DenjoyWolff denjoy_wolff(const DiscMap& f, Complex z0, double tol, long n_max) {
  require_in_disc(z0);
  DenjoyWolff dw;
  Complex z = z0;
  bool settled = false;
  for (long n = 1; n <= n_max; ++n) {
    const Complex next = f(z);
    double step;
    if (std::abs(next) > 0.999 || std::abs(z) > 0.999 || !(std::abs(next) < 1.0))
      step = std::abs(next - z);
    else
      step = poincare_distance(z, next);
    z = next;
    dw.steps = n;
    if (step < tol) {
      settled = true;
      break;
    }
  }
  const bool near_boundary = 1.0 - std::abs(z) < 1e-6;
  if (near_boundary) {
    dw.alpha = z / std::abs(z);
    dw.kind = settled ? DenjoyWolffKind::BoundaryPoint : DenjoyWolffKind::Undecided;
  } else {
    dw.alpha = z;
    dw.kind = settled ? DenjoyWolffKind::InteriorFixed : DenjoyWolffKind::Undecided;
    const double h = 1e-6 * std::max(1e-3, 1.0 - std::abs(z));
    dw.derivative = (f(z + h) - f(z - h)) / (2.0 * h);
  }
  return dw;
}

Complex LaurentTail::operator()(Complex z) const {
  Complex acc{};
  for (auto it = b.rbegin(); it != b.rend(); ++it) acc = acc * z + *it;
  return 1.0 / z + acc;
}

Complex LaurentTail::derivative(Complex z) const {
  Complex acc{};
  for (std::size_t n = b.size(); n-- > 1;) acc = acc * z + static_cast<double>(n) * b[n];
  return -1.0 / (z * z) + acc;
}

AreaReport area_theorem_sum(const LaurentTail& g) {
  AreaReport rep;
  for (std::size_t n = 0; n < g.b.size(); ++n) {
    rep.sum += static_cast<double>(n) * std::norm(g.b[n]);
    rep.partial_sums.push_back(rep.sum);
  }
  rep.pass = rep.sum <= 1.0 + 1e-9;
  rep.grid_injective = grid_injective([&g](Complex z) { return g(z); });
  // Zeros of z^2 g'(z) inside |z| < 0.999 are critical points of g.
  std::vector<Complex> curve;
  const int samples = 4096;
  for (int j = 0; j < samples; ++j) {
    const Complex z = std::polar(0.999, 2.0 * kPi * j / samples);
    curve.push_back(z * z * g.derivative(z));
  }
  rep.critical_points = winding_number(curve, 0.0);
  rep.univalence_suspect = !rep.grid_injective || rep.critical_points != 0;
  return rep;
}

UnivalentFunction from_series(const PowerSeries& s, std::string label) {
  UnivalentFunction f;
  f.series = s;
  f.eval = [s](Complex z) { return s(z); };
  const PowerSeries ds = s.derivative();
  f.deriv = [ds](Complex z) { return ds(z); };
  f.label = std::move(label);
  return f;
}

UnivalentFunction koebe_function(int order) {
  PowerSeries s(order);
  for (int n = 1; n <= order; ++n) s[n] = static_cast<double>(n);
  UnivalentFunction f;
  f.series = s;
  f.eval = [](Complex z) { return z / ((1.0 - z) * (1.0 - z)); };
  f.deriv = [](Complex z) { return (1.0 + z) / ((1.0 - z) * (1.0 - z) * (1.0 - z)); };
  f.label = "koebe-function";
  return f;
}

bool grid_injective(const std::function<Complex(Complex)>& f, double tol) {
  const std::vector<Complex> pts = polar_grid();
  std::vector<Complex> img;
  img.reserve(pts.size());
  for (Complex z : pts) img.push_back(f(z));
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t j = i + 1; j < img.size(); ++j)
      if (std::abs(img[i] - img[j]) <= tol * (1.0 + std::abs(img[i]))) return false;
  return true;
}

int winding_number(const std::vector<Complex>& curve, Complex w) {
  double total = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const Complex a = curve[k] - w;
    const Complex b = curve[(k + 1) % curve.size()] - w;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

KoebeReport koebe_quarter_check(const UnivalentFunction& f, int resolution, int boundary_samples,
                                double r) {
  if (std::abs(f.eval(0.0)) > 1e-12 || std::abs(f.series[1] - 1.0) > 1e-12 ||
      std::abs(f.series[0]) > 1e-12)
    throw Error(ErrorCode::NotNormalized, f.label + " is not normalized f(0)=0, f'(0)=1");
  if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 2");
  KoebeReport rep;
  rep.a2 = f.series[2];
  rep.a2_ok = std::abs(rep.a2) <= 2.0 + 1e-9;
  rep.univalent_grid = grid_injective(f.eval);

  std::vector<Complex> curve;
  curve.reserve(static_cast<std::size_t>(boundary_samples));
  for (int j = 0; j < boundary_samples; ++j)
    curve.push_back(f.eval(std::polar(r, 2.0 * kPi * j / boundary_samples)));
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      const Complex w(rep.cover_radius * (2.0 * i / (resolution - 1) - 1.0),
                      rep.cover_radius * (2.0 * j / (resolution - 1) - 1.0));
      if (std::abs(w) > rep.cover_radius) continue;
      ++rep.grid_points;
      if (winding_number(curve, w) != 1) ++rep.uncovered;
    }
  rep.covered = rep.uncovered == 0;
  rep.pass = rep.a2_ok && rep.covered && rep.univalent_grid;
  return rep;
}

DistortionReport koebe_distortion_check(const UnivalentFunction& f, double s, int samples) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::InvalidArgument, "need 0 < s < 1");
  DistortionReport rep;
  rep.s = s;
  std::vector<Complex> ring;
  for (int j = 0; j < samples; ++j) ring.push_back(f.eval(std::polar(s, 2.0 * kPi * j / samples)));
  for (std::size_t i = 0; i < ring.size(); ++i)
    for (std::size_t j = i + 1; j < ring.size(); ++j)
      rep.diameter = std::max(rep.diameter, std::abs(ring[i] - ring[j]));

  std::vector<double> x, w;
  gauss_legendre(64, x, w);
  const int m = 256;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double ring_sum = 0.0;
    for (int j = 0; j < m; ++j) ring_sum += std::norm(f.deriv(std::polar(x[i], 2.0 * kPi * j / m)));
    rep.area += w[i] * x[i] * ring_sum * (2.0 * kPi / m);
  }
  for (int n = 1; n <= f.series.order(); ++n) rep.series_area += n * std::norm(f.series[n]);
  rep.series_area *= kPi;
  rep.ratio = rep.diameter / std::sqrt(rep.area);
  return rep;
}

}  // namespace cdyn
