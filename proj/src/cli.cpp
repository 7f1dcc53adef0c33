#include "cdyn/cli.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cdyn/discmaps.hpp"
#include "cdyn/error.hpp"
#include "cdyn/linearize.hpp"
#include "cdyn/measure.hpp"
#include "cdyn/orbits.hpp"
#include "cdyn/roots.hpp"
#include "cdyn/sampling.hpp"
#include "json.hpp"

namespace cdyn {
namespace {

using json = nlohmann::ordered_json;

json cj(Complex z) { return json::array({z.real(), z.imag()}); }

json cj(const std::vector<Complex>& zs) {
  json a = json::array();
  for (Complex z : zs) a.push_back(cj(z));
  return a;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  for (const std::string& s : split(text, ',')) out.push_back(parse_complex(s));
  if (out.empty()) throw Error(ErrorCode::Parse, "empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const std::string& s : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "not an integer: '" + s + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::Parse, "empty list");
  return out;
}

double parse_real(const std::string& s) {
  const Complex z = parse_complex(s);
  if (z.imag() != 0.0) throw Error(ErrorCode::Parse, "expected a real number: '" + s + "'");
  return z.real();
}

// Options shared by most subcommands.
struct Common {
  std::string poly = "0,0,1";
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* poly_opt = nullptr;
  int tasks = 1;
  std::string report;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  c.poly_opt = sub->add_option("-p,--poly", c.poly, "polynomial, ascending coefficients");
  c.seed_opt = sub->add_option("--seed", c.seed, "random seed (required when sampling)");
  sub->add_option("--tasks", c.tasks, "parallel sampling tasks")->check(CLI::PositiveNumber);
  sub->add_option("--report", c.report, "write the JSON report to this file");
  sub->add_option("--out", c.out, "write CSV output to this file");
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  int status = 0;
};

void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  f << data;
  if (!f) throw Error(ErrorCode::InvalidArgument, "write failed for " + path);
}

// JSON to --report, else stdout. With `csv_on_stdout` the report is only
// written when a file was requested.
void emit_report(Context& ctx, const Common& c, const json& report, bool csv_on_stdout = false) {
  const std::string text = report.dump(2) + "\n";
  if (!c.report.empty())
    write_file(c.report, text);
  else if (!csv_on_stdout)
    ctx.out << text;
}

void emit_csv(Context& ctx, const Common& c, const std::string& csv) {
  if (c.out.empty())
    ctx.out << csv;
  else
    write_file(c.out, csv);
}

void require_seed(const Common& c, const std::string& why) {
  if (c.seed_opt->count() == 0)
    throw Error(ErrorCode::InvalidArgument, "--seed is required: " + why);
}

Polynomial dynamical_poly(const Common& c) {
  const Polynomial p = parse_polynomial(c.poly);
  if (p.degree() < 2) throw Error(ErrorCode::InvalidArgument, "polynomial degree must be >= 2");
  return p;
}

void assert_check(Context& ctx, bool ok, const std::string& what) {
  if (!ok) {
    ctx.err << "assertion failed: " << what << "\n";
    ctx.status = exit_code(ErrorCode::AssertionFailed);
  }
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  Common c;
  int period = 1;
  double neutral_tol = 1e-6;
  int root_of_unity_max = 64;
};

void cmd_classify(Context& ctx, const ClassifyArgs& a) {
  const Polynomial p = dynamical_poly(a.c);
  if (a.period < 1) throw Error(ErrorCode::InvalidArgument, "--period must be >= 1");
  const Census census = orbit_census(p, a.period, {a.neutral_tol, a.root_of_unity_max});
  json orbits = json::array();
  ctx.err << "period  class                 multiplier                        points\n";
  for (const PeriodicOrbit& o : census.orbits) {
    const std::string cls = to_string(o.classification);
    orbits.push_back({{"period", o.period},
                      {"class", cls},
                      {"multiplier", cj(o.multiplier)},
                      {"multiplicity", o.multiplicity},
                      {"points", cj(o.points)}});
    ctx.err << o.period << "       " << cls << std::string(cls.size() < 22 ? 22 - cls.size() : 1, ' ')
            << format_complex(o.multiplier) << "    ";
    for (Complex z : o.points) ctx.err << format_complex(z) << " ";
    ctx.err << "\n";
  }
  ctx.err << "inf     Superattracting\n";
  const json report = {{"command", "classify"},
                       {"polynomial", format_polynomial(p)},
                       {"period", a.period},
                       {"infinity", {{"class", "Superattracting"}}},
                       {"census", {{"nonrepelling", census.nonrepelling}, {"bound", census.bound}}},
                       {"orbits", orbits}};
  emit_report(ctx, a.c, report);
}

// ---------------------------------------------------------------- julia

struct JuliaArgs {
  Common c;
  int depth = 12;
  long budget = 1L << 16;
  long samples = 0;
  CLI::Option* samples_opt = nullptr;
  std::string basepoint;
  int burn_in = 20;
  std::string pgm;
  int width = 512, height = 512;
  std::string bbox;
};

std::string pgm_image(const PointCloud& cloud, int width, int height, const std::array<double, 4>& box) {
  std::vector<long> counts(static_cast<std::size_t>(width) * height, 0);
  for (Complex z : cloud.points) {
    const double fx = (z.real() - box[0]) / (box[1] - box[0]);
    const double fy = (box[3] - z.imag()) / (box[3] - box[2]);
    if (!(fx >= 0.0 && fx < 1.0 && fy >= 0.0 && fy < 1.0)) continue;
    const long px = static_cast<long>(fx * width), py = static_cast<long>(fy * height);
    ++counts[static_cast<std::size_t>(py * width + px)];
  }
  const long peak = std::max(1L, *std::max_element(counts.begin(), counts.end()));
  std::string img = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (long v : counts) {
    long level = v == 0 ? 0 : std::max(1L, std::lround(255.0 * static_cast<double>(v) / peak));
    img.push_back(static_cast<char>(static_cast<unsigned char>(level)));
  }
  return img;
}

void cmd_julia(Context& ctx, const JuliaArgs& a) {
  const Polynomial p = dynamical_poly(a.c);
  if (a.depth < 0) throw Error(ErrorCode::InvalidArgument, "-n must be >= 0");
  const Complex z = a.basepoint.empty() ? Complex(escape_radius(p) + 1.0) : parse_complex(a.basepoint);
  PointCloud cloud;
  bool sampled;
  Complex tree_root = z;
  if (a.samples_opt->count() > 0) {
    if (a.samples < 1) throw Error(ErrorCode::InvalidArgument, "--samples must be >= 1");
    require_seed(a.c, "--samples draws random backward orbits");
    if (exceptional_set(p).contains(z))
      throw Error(ErrorCode::ExceptionalBasepoint, format_complex(z) + " is exceptional");
    cloud.points = sample_backward_orbits(p, z, a.burn_in + a.depth, a.samples, a.c.seed, a.c.tasks);
    cloud.weights.assign(cloud.points.size(), 1.0 / static_cast<double>(a.samples));
    sampled = true;
  } else {
    sampled = bounded_power(p.degree(), a.depth, a.budget) > a.budget;
    if (sampled) require_seed(a.c, "d^n exceeds the budget, so the cloud is sampled");
    Complex root = z;
    if (!sampled) {
      if (exceptional_set(p).contains(z))
        throw Error(ErrorCode::ExceptionalBasepoint, format_complex(z) + " is exceptional");
      // Burn-in along the first preimage branch so the tree starts near J.
      for (int k = 0; k < a.burn_in; ++k) root = preimages(p, root).roots.front();
    }
    cloud = julia_cloud(p, root, a.depth, a.budget, a.c.seed, {a.burn_in, a.c.tasks});
    tree_root = root;
  }

  std::string csv = "re,im,weight\n";
  char buf[96];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", cloud.points[i].real(),
                  cloud.points[i].imag(), cloud.weights[i]);
    csv += buf;
  }
  emit_csv(ctx, a.c, csv);

  json report = {{"command", "julia"},
                 {"polynomial", format_polynomial(p)},
                 {"basepoint", cj(z)},
                 {"depth", a.depth},
                 {"mode", sampled ? "sampled" : "exact"},
                 {"points", cloud.size()}};
  report["burn_in"] = a.burn_in;
  if (!sampled) report["tree_root"] = cj(tree_root);
  if (sampled) {
    report["seed"] = a.c.seed;
    report["tasks"] = a.c.tasks;
  }
  if (!a.pgm.empty()) {
    if (a.width < 1 || a.height < 1) throw Error(ErrorCode::InvalidArgument, "bad raster size");
    std::array<double, 4> box;
    if (a.bbox.empty()) {
      const double r = escape_radius(p);
      box = {-r, r, -r, r};
    } else {
      const auto parts = split(a.bbox, ',');
      if (parts.size() != 4) throw Error(ErrorCode::Parse, "--bbox needs xmin,xmax,ymin,ymax");
      for (std::size_t i = 0; i < 4; ++i) box[i] = parse_real(parts[i]);
      if (!(box[0] < box[1] && box[2] < box[3])) throw Error(ErrorCode::InvalidArgument, "empty --bbox");
    }
    write_file(a.pgm, pgm_image(cloud, a.width, a.height, box));
    report["pgm"] = {{"path", a.pgm}, {"width", a.width}, {"height", a.height}, {"bbox", box}};
  }
  emit_report(ctx, a.c, report, a.c.out.empty());
}

// ---------------------------------------------------------------- measure

struct MeasureArgs {
  Common c;
  std::string x = "2", y = "3";
  int n = 12;
  int n_min = -1;
  long budget = 1L << 16;
  int lags = 6;
  std::string phi = "Re z", psi = "Re z";
  std::string atoms;
  std::string center;
  double radius = 0.05;
  long branches = 2000;
  int ell = 20;
  int boundary = 16;
};

TestFunction named_function(const std::string& name) {
  for (const TestFunction& f : default_panel())
    if (f.label == name) return f;
  if (name == "1") return finite_function("1", [](Complex) { return Complex(1.0); }, 1.0);
  if (name == "upper") return upper_half_indicator();
  throw Error(ErrorCode::Parse, "unknown test function '" + name + "'");
}

MeasureOptions measure_opts(const MeasureArgs& a) {
  MeasureOptions o;
  o.budget = a.budget;
  o.tasks = a.c.tasks;
  return o;
}

// Seed and task count only matter (and are only echoed) when sampling, so
// exact-mode reports do not depend on --tasks.
json measure_params(const MeasureArgs& a, const Polynomial& p, bool sampled) {
  json j = {{"polynomial", format_polynomial(p)}, {"budget", a.budget}, {"mode", sampled ? "sampled" : "exact"}};
  if (sampled) {
    j["seed"] = a.c.seed;
    j["tasks"] = a.c.tasks;
  }
  return j;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

void cmd_measure_gap(Context& ctx, const MeasureArgs& a) {
  const Polynomial p = dynamical_poly(a.c);
  const Complex x = parse_complex(a.x), y = parse_complex(a.y);
  const int n_min = a.n_min < 0 ? a.n : a.n_min;
  if (n_min < 0 || n_min > a.n) throw Error(ErrorCode::InvalidArgument, "need 0 <= --nmin <= -n");
  if (!exact_mode(p, a.n, a.budget)) require_seed(a.c, "d^n exceeds the budget, so the measures are sampled");
  const auto panel = default_panel();
  json per_n = json::array(), entries = json::array();
  std::vector<double> ns, logs;
  for (int n = n_min; n <= a.n; ++n) {
    const GapReport g = weak_gap(p, x, y, n, panel, a.c.seed, measure_opts(a));
    per_n.push_back({{"n", n}, {"value", g.gap}, {"stderr", g.std_error}, {"exact", g.exact}});
    if (g.gap > 0.0) {
      ns.push_back(n);
      logs.push_back(std::log(g.gap));
    }
    if (n == a.n)
      for (const PanelEntry& e : g.entries)
        entries.push_back({{"label", e.label}, {"at_x", cj(e.at_x)}, {"at_y", cj(e.at_y)},
                           {"diff", e.diff}, {"stderr", e.std_error}});
  }
  json params = measure_params(a, p, !exact_mode(p, a.n, a.budget));
  params["x"] = cj(x);
  params["y"] = cj(y);
  params["n"] = a.n;
  const json report = {{"operation", "gap"},
                       {"params", params},
                       {"per_n", per_n},
                       {"panel", entries},
                       {"fitted", {{"log_gap_slope", fit_slope(ns, logs)}}}};
  emit_report(ctx, a.c, report);
}

void cmd_measure_mixing(Context& ctx, const MeasureArgs& a) {
  const Polynomial p = dynamical_poly(a.c);
  const Complex x = parse_complex(a.x);
  if (!exact_mode(p, a.n, a.budget)) require_seed(a.c, "d^n exceeds the budget, so the measure is sampled");
  const EmpiricalMeasure mu = mu_nx(p, x, a.n, a.c.seed, measure_opts(a));
  const TestFunction phi = named_function(a.phi), psi = named_function(a.psi);
  json per_n = json::array();
  double worst = 0.0;
  for (int lag = 1; lag <= a.lags; ++lag) {
    const Complex c = mixing_correlation(p, phi, psi, lag, mu);
    worst = std::max(worst, std::abs(c));
    per_n.push_back({{"n", lag}, {"value", std::abs(c)}, {"stderr", 0.0}, {"correlation", cj(c)}});
  }
  json params = measure_params(a, p, !exact_mode(p, a.n, a.budget));
  params["x"] = cj(x);
  params["depth"] = a.n;
  params["phi"] = phi.label;
  params["psi"] = psi.label;
  const json report = {{"operation", "mixing"},
                       {"params", params},
                       {"per_n", per_n},
                       {"fitted", {{"max_abs_correlation", worst}}}};
  emit_report(ctx, a.c, report);
}

void cmd_measure_cesaro(Context& ctx, const MeasureArgs& a) {
  const Polynomial p = dynamical_poly(a.c);
  const Complex x = parse_complex(a.x);
  if (a.n < 1) throw Error(ErrorCode::InvalidArgument, "-n must be >= 1");
  json per_n = json::array();
  EmpiricalMeasure last;
  const bool exact = exact_mode(p, a.n, a.budget);
  if (exact) {
    const auto seq = cesaro_sequence(p, x, a.n);
    for (int j = 2; j <= a.n; ++j) {
      const double tv = total_variation(seq[static_cast<std::size_t>(j) - 1], seq[static_cast<std::size_t>(j) - 2]);
      per_n.push_back({{"n", j}, {"value", tv}, {"stderr", 0.0}, {"bound", 2.0 / j}});
      assert_check(ctx, tv <= 2.0 / j + 1e-9, "Cesaro mass bound at n=" + std::to_string(j));
    }
    last = seq.back();
  } else {
    require_seed(a.c, "d^n exceeds the budget, so the measures are sampled");
    last = cesaro(p, x, a.n, a.c.seed, measure_opts(a));
  }
  if (!a.c.out.empty()) write_file(a.c.out, measure_csv(last));
  json params = measure_params(a, p, !exact);
  params["x"] = cj(x);
  params["n"] = a.n;
  const json report = {{"operation", "cesaro"},
                       {"params", params},
                       {"atoms", last.size()},
                       {"per_n", per_n},
                       {"fitted", json::object()}};
  emit_report(ctx, a.c, report);
}

void cmd_measure_massgap(Context& ctx, const MeasureArgs& a) {
  const Polynomial p = dynamical_poly(a.c);
  const Complex x = parse_complex(a.x);
  if (a.n < 1) throw Error(ErrorCode::InvalidArgument, "-n must be >= 1");
  if (!exact_mode(p, a.n + 1, a.budget))
    throw Error(ErrorCode::InvalidArgument, "cesaro-massgap needs exact mode (d^(n+1) <= budget)");
  const auto seq = cesaro_sequence(p, x, a.n + 1);
  json per_n = json::array();
  double observed = 0.0;
  for (int j = 1; j <= a.n; ++j) {
    const double tv = total_variation(seq[static_cast<std::size_t>(j)], seq[static_cast<std::size_t>(j) - 1]);
    per_n.push_back({{"n", j}, {"value", tv}, {"stderr", 0.0}, {"bound", 2.0 / (j + 1)}});
    if (j == a.n) observed = tv;
  }
  const double bound = 2.0 / (a.n + 1);
  const bool pass = observed <= bound + 1e-9;
  assert_check(ctx, pass, "Cesaro mass bound");
  json params = measure_params(a, p, false);
  params["x"] = cj(x);
  params["n"] = a.n;
  const json report = {{"operation", "cesaro-massgap"},
                       {"params", params},
                       {"per_n", per_n},
                       {"fitted", {{"bound", bound}, {"observed", observed}, {"pass", pass}}}};
  emit_report(ctx, a.c, report);
}

void cmd_measure_duality(Context& ctx, const MeasureArgs& a) {
  const Polynomial p = dynamical_poly(a.c);
  EmpiricalMeasure nu;
  json params = measure_params(a, p, a.atoms.empty() && !exact_mode(p, a.n, a.budget));
  if (!a.atoms.empty()) {
    const auto pts = parse_complex_list(a.atoms);
    for (Complex z : pts) nu.add(z, 1.0 / static_cast<double>(pts.size()));
    params["atoms"] = cj(pts);
  } else {
    const Complex x = parse_complex(a.x);
    if (!exact_mode(p, a.n, a.budget)) require_seed(a.c, "d^n exceeds the budget, so the measure is sampled");
    nu = mu_nx(p, x, a.n, a.c.seed, measure_opts(a));
    params["x"] = cj(x);
    params["n"] = a.n;
  }
  json per_fn = json::array();
  double worst = 0.0;
  for (const TestFunction& phi : default_panel()) {
    const double r = duality_residual(p, phi, nu);
    worst = std::max(worst, r);
    per_fn.push_back({{"label", phi.label}, {"residual", r}});
  }
  const bool pass = worst < 1e-8;
  assert_check(ctx, pass, "duality residual below 1e-8");
  const json report = {{"operation", "duality"},
                       {"params", params},
                       {"per_n", json::array({{{"n", a.n}, {"value", worst}, {"stderr", 0.0}}})},
                       {"panel", per_fn},
                       {"fitted", {{"max_residual", worst}, {"threshold", 1e-8}, {"pass", pass}}}};
  emit_report(ctx, a.c, report);
}

void cmd_measure_lyubich(Context& ctx, const MeasureArgs& a) {
  const Polynomial p = dynamical_poly(a.c);
  require_seed(a.c, "inverse branches are sampled");
  const Complex center = a.center.empty() ? Complex(escape_radius(p) + 1.0) : parse_complex(a.center);
  LyubichOptions opts;
  opts.ell = a.ell;
  opts.boundary_samples = a.boundary;
  opts.tasks = a.c.tasks;
  const LyubichReport r = lyubich_diameters(p, center, a.radius, a.n, a.branches, a.c.seed, opts);
  json per_n = json::array();
  for (const LyubichLevel& lv : r.levels)
    per_n.push_back({{"n", lv.n},
                     {"value", lv.mean_log_diameter},
                     {"stderr", lv.std_error},
                     {"median_diameter", lv.median_diameter},
                     {"fraction_exceeding", lv.fraction_exceeding}});
  json params = measure_params(a, p, true);
  params["center"] = cj(center);
  params["radius"] = a.radius;
  params["nmax"] = a.n;
  params["branches"] = a.branches;
  params["ell"] = a.ell;
  const bool within = std::abs(r.slope - r.target_slope) <= 0.15;
  const json report = {{"operation", "lyubich"},
                       {"params", params},
                       {"per_n", per_n},
                       {"fitted",
                        {{"slope", r.slope},
                         {"intercept", r.intercept},
                         {"target_slope", r.target_slope},
                         {"tolerance", 0.15},
                         {"slope_within_tolerance", within},
                         {"c", r.fitted_c},
                         {"fraction_below", r.fraction_below}}}};
  emit_report(ctx, a.c, report);
}

// ---------------------------------------------------------------- linearize

struct LinearizeArgs {
  Common c;
  std::string z0;
  int order = 30;
  std::string siegel;
  std::string theta;
  std::string diophantine;
  std::string cremer;
  std::string degrees = "2";
  double epsilon = 0.05;
  double residual_radius = 0.01;
};

double parse_theta(const std::string& s) {
  if (s == "golden") return golden_theta();
  return parse_real(s);
}

json series_json(const PowerSeries& s) {
  json a = json::array();
  for (int k = 0; k <= s.order(); ++k) a.push_back(cj(s[k]));
  return a;
}

json linearization_json(const std::string& mode, const Linearization& lin) {
  return {{"mode", mode},
          {"fixed_point", cj(lin.center)},
          {"multiplier", cj(lin.multiplier)},
          {"order", lin.series.order()},
          {"radius_hint", lin.series.radius_hint()},
          {"residual", lin.residual},
          {"residual_radius", lin.residual_radius},
          {"denominators_min", lin.denominators_min}};
}

void cmd_linearize(Context& ctx, const LinearizeArgs& a) {
  json report = {{"command", "linearize"}};
  const bool subchecks = !a.diophantine.empty() || !a.cremer.empty();
  const bool main_run = !a.siegel.empty() || a.c.poly_opt->count() > 0 || !subchecks;
  if (a.order < 1) throw Error(ErrorCode::InvalidArgument, "-N must be >= 1");
  std::string csv;

  if (main_run && !a.siegel.empty()) {
    const double theta = parse_theta(a.siegel);
    const Complex lambda = std::polar(1.0, 2.0 * std::numbers::pi * theta);
    const Polynomial p = a.c.poly == "quad" ? Polynomial({0.0, lambda, 1.0}) : parse_polynomial(a.c.poly);
    const Linearization lin = siegel_series(lambda, p, a.order, a.residual_radius);
    json j = linearization_json("siegel", lin);
    j["theta"] = theta;
    j["polynomial"] = format_polynomial(p);
    j["max_inverse_denominator"] = 1.0 / lin.denominators_min;
    json ledger = json::array();
    for (std::size_t i = 0; i < lin.denominators.size(); ++i)
      ledger.push_back({{"j", i + 2}, {"modulus", lin.denominators[i]}});
    j["denominators"] = ledger;
    if (a.c.out.empty()) j["coefficients"] = series_json(lin.series);
    report["linearization"] = j;
    csv = series_csv(lin.series);
  } else if (main_run) {
    if (a.c.poly == "quad") throw Error(ErrorCode::InvalidArgument, "-p quad needs --siegel");
    const Polynomial p = dynamical_poly(a.c);
    Complex z0;
    if (!a.z0.empty()) {
      z0 = parse_complex(a.z0);
    } else {
      // The most attracting fixed point.
      const RootSet fixed = periodic_points(p, 1);
      const Polynomial dp = derivative(p);
      z0 = *std::min_element(fixed.roots.begin(), fixed.roots.end(), [&](Complex u, Complex v) {
        return std::abs(dp(u)) < std::abs(dp(v));
      });
    }
    const Complex lambda = derivative(p)(z0);
    const Classification cls = classify(lambda);
    json j;
    if (cls.kind == OrbitKind::Superattracting) {
      const Linearization lin = boettcher_series(p, z0, a.order);
      j = linearization_json("boettcher", lin);
      j["gauge"] = cj(lin.gauge);
      j["local_degree"] = lin.local_degree;
      if (a.c.out.empty()) j["coefficients"] = series_json(lin.series);
      csv = series_csv(lin.series);
    } else if (cls.kind == OrbitKind::Attracting || cls.kind == OrbitKind::Repelling) {
      const Linearization lin = koenigs(p, z0, a.order);
      j = linearization_json("koenigs", lin);
      if (a.c.out.empty()) j["coefficients"] = series_json(lin.series);
      csv = series_csv(lin.series);
    } else if (cls.kind == OrbitKind::RationallyNeutral) {
      if (cls.q != 1)
        throw Error(ErrorCode::ResonantMultiplier,
                    "multiplier is a primitive root of unity of order " + std::to_string(cls.q));
      Polynomial q = conjugate_affine(p, AffineMap{Complex(1.0), -z0});
      std::vector<Complex> c(q.coeffs().begin(), q.coeffs().end());
      c[0] = 0.0;
      c[1] = 1.0;
      q = Polynomial(c);
      int k = 1;
      while (k + 1 <= q.degree() && std::abs(q[k + 1]) <= 1e-12) ++k;
      PetalOptions po;
      po.epsilon = a.epsilon;
      const PetalReport pr = parabolic_petal(q, k, po);
      json fatou = json::array();
      for (const FatouSample& f : pr.fatou) fatou.push_back({{"w", f.w}, {"deviation", f.deviation}});
      j = {{"mode", "parabolic"},
           {"fixed_point", cj(z0)},
           {"multiplier", cj(lambda)},
           {"k", k},
           {"leading", cj(pr.leading)},
           {"normalized", format_polynomial(pr.normalized)},
           {"sector_exact", pr.sector_exact},
           {"epsilon", pr.epsilon},
           {"epsilon_image", pr.epsilon_image},
           {"boundary_samples", pr.boundary_samples},
           {"boundary_inside", pr.boundary_inside},
           {"orbit_steps", pr.orbit_steps},
           {"orbit_converged", pr.orbit_converged},
           {"fatou", fatou},
           {"verified", pr.verified}};
    } else {
      Polynomial q = conjugate_affine(p, AffineMap{Complex(1.0), -z0});
      std::vector<Complex> c(q.coeffs().begin(), q.coeffs().end());
      c[0] = 0.0;
      c[1] = lambda / std::abs(lambda);
      const Linearization lin = siegel_series(c[1], Polynomial(c), a.order, a.residual_radius);
      j = linearization_json("siegel", lin);
      j["fixed_point"] = cj(z0);
      if (a.c.out.empty()) j["coefficients"] = series_json(lin.series);
      csv = series_csv(lin.series);
    }
    j["polynomial"] = format_polynomial(p);
    j["class"] = to_string(cls);
    report["linearization"] = j;
  }

  if (!a.diophantine.empty()) {
    const auto parts = split(a.diophantine, ',');
    if (parts.size() != 3) throw Error(ErrorCode::Parse, "--diophantine needs c,mu,nmax");
    DiophantineParams dp;
    dp.c = parse_real(parts[0]);
    dp.mu = parse_real(parts[1]);
    dp.n_max = static_cast<long long>(parse_real(parts[2]));
    const double theta = parse_theta(!a.theta.empty() ? a.theta : !a.siegel.empty() ? a.siegel : "golden");
    const DiophantineReport d = diophantine_check(theta, dp);
    report["diophantine"] = {{"theta", theta}, {"c", dp.c},         {"mu", dp.mu},
                             {"n_max", dp.n_max}, {"margin", d.margin}, {"argmin", d.argmin},
                             {"pass", d.pass}};
  }
  if (!a.cremer.empty()) {
    const std::vector<int> q = parse_int_list(a.cremer);
    const CremerReport cr = cremer_theta(q, static_cast<int>(q.size()), parse_int_list(a.degrees));
    json terms = json::array();
    bool all = true;
    for (const CremerTerm& t : cr.terms) {
      json growth = json::array();
      for (const CremerGrowth& g : t.growth)
        growth.push_back({{"degree", g.degree},
                          {"lhs_log", g.lhs_log},
                          {"rhs_log", g.rhs_log},
                          {"exponent_log", g.exponent_log},
                          {"representable", g.representable},
                          {"holds", g.holds}});
      terms.push_back({{"ell", t.ell},
                       {"distance", t.distance},
                       {"bound", t.bound},
                       {"certified", t.certified},
                       {"growth", growth}});
      all = all && t.certified;
    }
    report["cremer"] = {{"q", q}, {"theta", cr.theta}, {"terms", terms}, {"certified", all}};
    assert_check(ctx, all, "Cremer smallness certificate");
  }
  if (!csv.empty() && !a.c.out.empty()) write_file(a.c.out, csv);
  emit_report(ctx, a.c, report);
}

// ---------------------------------------------------------------- disc

struct DiscArgs {
  Common c;
  std::string mobius_t, blaschke_zeros, poly_map, series;
  double rotation = 0.0;
  std::string z0 = "0";
  double tol = 1e-10;
  long n_max = 1'000'000;
  long pairs = 1000;
  std::string tail;
  int order = 30;
  int resolution = 41;
  double s = 0.5;
};

DiscMap disc_map(const DiscArgs& a, json& inputs) {
  const int given = !a.mobius_t.empty() + !a.blaschke_zeros.empty() + !a.poly_map.empty() + !a.series.empty();
  if (given != 1) throw Error(ErrorCode::InvalidArgument, "give exactly one of --mobius, --blaschke, --map-poly, --series");
  const Complex rot = std::polar(1.0, a.rotation);
  if (!a.mobius_t.empty()) {
    const Complex t = parse_complex(a.mobius_t);
    inputs["map"] = {{"kind", "mobius"}, {"t", cj(t)}, {"rotation", a.rotation}};
    return mobius(t, rot);
  }
  if (!a.blaschke_zeros.empty()) {
    const auto zeros = parse_complex_list(a.blaschke_zeros);
    inputs["map"] = {{"kind", "blaschke"}, {"zeros", cj(zeros)}, {"rotation", a.rotation}};
    return blaschke(zeros, rot);
  }
  if (!a.poly_map.empty()) {
    const Polynomial p = parse_polynomial(a.poly_map);
    inputs["map"] = {{"kind", "polynomial"}, {"polynomial", format_polynomial(p)}};
    return polynomial_map(p);
  }
  const auto coeffs = parse_complex_list(a.series);
  inputs["map"] = {{"kind", "series"}, {"coefficients", cj(coeffs)}};
  return series_map(PowerSeries(coeffs));
}

UnivalentFunction univalent(const DiscArgs& a, json& inputs) {
  if (a.series.empty()) throw Error(ErrorCode::InvalidArgument, "--series is required");
  if (a.series == "koebe-function") {
    inputs["series"] = "koebe-function";
    inputs["order"] = a.order;
    return koebe_function(a.order);
  }
  const auto coeffs = parse_complex_list(a.series);
  inputs["series"] = cj(coeffs);
  return from_series(PowerSeries(coeffs), "series");
}

void cmd_disc_dw(Context& ctx, const DiscArgs& a) {
  json inputs;
  const DiscMap f = disc_map(a, inputs);
  const Complex z0 = parse_complex(a.z0);
  inputs["z0"] = cj(z0);
  inputs["n_max"] = a.n_max;
  const DenjoyWolff dw = denjoy_wolff(f, z0, a.tol, a.n_max);
  json stat = {{"alpha", cj(dw.alpha)}, {"kind", to_string(dw.kind)}, {"steps", dw.steps}};
  if (dw.kind == DenjoyWolffKind::InteriorFixed) stat["derivative"] = cj(dw.derivative);
  const json report = {{"check", "denjoy-wolff"},
                       {"inputs", inputs},
                       {"statistic", stat},
                       {"threshold", a.tol},
                       {"pass", dw.kind != DenjoyWolffKind::Undecided}};
  emit_report(ctx, a.c, report);
}

void cmd_disc_sp(Context& ctx, const DiscArgs& a) {
  json inputs;
  const DiscMap f = disc_map(a, inputs);
  require_seed(a.c, "test pairs are random");
  inputs["pairs"] = a.pairs;
  inputs["seed"] = a.c.seed;
  Engine engine(derive_seed(a.c.seed, 0));
  auto point = [&engine] {
    const double r = 0.95 * std::sqrt(uniform01(engine));
    return std::polar(r, 2.0 * std::numbers::pi * uniform01(engine));
  };
  double worst = 0.0, best = kInf;
  long tested = 0;
  for (long i = 0; i < a.pairs; ++i) {
    const Complex z = point(), w = point();
    if (z == w) continue;
    const double r = schwarz_pick(f, z, w).ratio;
    worst = std::max(worst, r);
    best = std::min(best, r);
    ++tested;
  }
  const bool pass = worst <= 1.0 + 1e-10;
  assert_check(ctx, pass, "Schwarz-Pick ratio <= 1");
  const json report = {{"check", "schwarz-pick"},
                       {"inputs", inputs},
                       {"statistic", {{"max_ratio", worst}, {"min_ratio", best}, {"pairs", tested},
                                      {"automorphism", f.automorphism}}},
                       {"threshold", 1.0 + 1e-10},
                       {"pass", pass}};
  emit_report(ctx, a.c, report);
}

void cmd_disc_area(Context& ctx, const DiscArgs& a) {
  if (a.tail.empty()) throw Error(ErrorCode::InvalidArgument, "--tail is required");
  const LaurentTail g{parse_complex_list(a.tail)};
  const AreaReport r = area_theorem_sum(g);
  const json report = {{"check", "area"},
                       {"inputs", {{"b", cj(g.b)}}},
                       {"statistic",
                        {{"sum", r.sum},
                         {"partial_sums", r.partial_sums},
                         {"grid_injective", r.grid_injective},
                         {"critical_points", r.critical_points},
                         {"univalence_suspect", r.univalence_suspect}}},
                       {"threshold", 1.0 + 1e-9},
                       {"pass", r.pass}};
  if (r.univalence_suspect) ctx.err << "warning: g does not look univalent on the sample grid\n";
  emit_report(ctx, a.c, report);
}

void cmd_disc_koebe(Context& ctx, const DiscArgs& a) {
  json inputs;
  const UnivalentFunction f = univalent(a, inputs);
  inputs["resolution"] = a.resolution;
  const KoebeReport r = koebe_quarter_check(f, a.resolution);
  const json report = {{"check", "koebe"},
                       {"inputs", inputs},
                       {"statistic",
                        {{"a2", cj(r.a2)},
                         {"abs_a2", std::abs(r.a2)},
                         {"a2_ok", r.a2_ok},
                         {"grid_points", r.grid_points},
                         {"uncovered", r.uncovered},
                         {"covered", r.covered},
                         {"univalent_grid", r.univalent_grid}}},
                       {"threshold", {{"abs_a2", 2.0 + 1e-9}, {"cover_radius", r.cover_radius}}},
                       {"pass", r.pass}};
  emit_report(ctx, a.c, report);
}

void cmd_disc_distortion(Context& ctx, const DiscArgs& a) {
  json inputs;
  const UnivalentFunction f = univalent(a, inputs);
  inputs["s"] = a.s;
  const DistortionReport r = koebe_distortion_check(f, a.s);
  const json report = {{"check", "distortion"},
                       {"inputs", inputs},
                       {"statistic",
                        {{"diameter", r.diameter},
                         {"area", r.area},
                         {"series_area", r.series_area},
                         {"ratio", r.ratio}}},
                       {"threshold", nullptr},
                       {"pass", std::isfinite(r.ratio)}};
  emit_report(ctx, a.c, report);
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest, injected;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw Error(ErrorCode::Parse, "--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::Parse, "cannot read config " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected key=value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      while (!key.empty() && key[0] == '-') key.erase(0, 1);
      if (key.empty()) throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": empty key");
      injected.push_back(key.size() == 1 ? "-" + key + value : "--" + key + "=" + value);
    }
  }
  // Subcommand words are the leading tokens that are not options.
  std::size_t head = 0;
  while (head < rest.size() && !rest[head].empty() && rest[head][0] != '-') ++head;
  std::vector<std::string> out(rest.begin(), rest.begin() + static_cast<long>(head));
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + static_cast<long>(head), rest.end());
  return out;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  CLI::App app{"Polynomial dynamics toolkit: orbits, Julia clouds, equilibrium measures, "
               "linearization and disc geometry"};
  app.name("cdyn");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.add_option("--config", "key=value file with default flags (command line wins)");

  std::function<void()> action;

  ClassifyArgs ca;
  auto* classify_cmd = app.add_subcommand("classify", "fixed and periodic orbits with multipliers");
  add_common(classify_cmd, ca.c);
  classify_cmd->add_option("--period", ca.period, "largest exact period listed");
  classify_cmd->add_option("--neutral-tol", ca.neutral_tol, "width of the neutral band");
  classify_cmd->add_option("--root-of-unity-max", ca.root_of_unity_max, "largest root-of-unity order");
  classify_cmd->callback([&] { action = [&] { cmd_classify(ctx, ca); }; });

  JuliaArgs ja;
  auto* julia_cmd = app.add_subcommand("julia", "Julia-set point cloud by backward iteration");
  add_common(julia_cmd, ja.c);
  julia_cmd->add_option("-n,--depth", ja.depth, "preimage depth");
  julia_cmd->add_option("--budget", ja.budget, "full tree when d^n <= budget");
  ja.samples_opt = julia_cmd->add_option("--samples", ja.samples, "force sampling with this many orbits");
  julia_cmd->add_option("-z,--basepoint", ja.basepoint, "basepoint (default escape radius + 1)");
  julia_cmd->add_option("--burn-in", ja.burn_in, "extra backward steps for sampled orbits");
  julia_cmd->add_option("--pgm", ja.pgm, "write a P5 hit-count raster");
  julia_cmd->add_option("--width", ja.width, "raster width");
  julia_cmd->add_option("--height", ja.height, "raster height");
  julia_cmd->add_option("--bbox", ja.bbox, "raster box xmin,xmax,ymin,ymax");
  julia_cmd->callback([&] { action = [&] { cmd_julia(ctx, ja); }; });

  MeasureArgs ma;
  auto* measure_cmd = app.add_subcommand("measure", "equilibrium-measure experiments");
  measure_cmd->require_subcommand(1);
  auto measure_sub = [&](const char* name, const char* help, void (*fn)(Context&, const MeasureArgs&)) {
    auto* s = measure_cmd->add_subcommand(name, help);
    add_common(s, ma.c);
    s->add_option("-x", ma.x, "basepoint x");
    s->add_option("-n", ma.n, "depth");
    s->add_option("--budget", ma.budget, "exact mode when d^n <= budget");
    s->callback([&, fn, s] {
      // The subcommands share one Common; bind the options of the one that ran.
      ma.c.seed_opt = s->get_option("--seed");
      ma.c.poly_opt = s->get_option("--poly");
      action = [&, fn] { fn(ctx, ma); };
    });
    return s;
  };
  auto* gap_cmd = measure_sub("gap", "panel gap between mu_{n,x} and mu_{n,y}", cmd_measure_gap);
  gap_cmd->add_option("-y", ma.y, "second basepoint");
  gap_cmd->add_option("--nmin", ma.n_min, "first depth reported (default -n)");
  auto* mixing_cmd = measure_sub("mixing", "correlations C_n on the depth-n measure", cmd_measure_mixing);
  mixing_cmd->add_option("--lags", ma.lags, "largest lag");
  mixing_cmd->add_option("--phi", ma.phi, "test function phi");
  mixing_cmd->add_option("--psi", ma.psi, "test function psi");
  measure_sub("cesaro", "Cesaro means of mu_{j,x}", cmd_measure_cesaro);
  measure_sub("cesaro-massgap", "TV(lambda_{n+1}, lambda_n) against 2/(n+1)", cmd_measure_massgap);
  auto* duality_cmd = measure_sub("duality", "pullback / pushforward duality residual", cmd_measure_duality);
  duality_cmd->add_option("--atoms", ma.atoms, "equal-weight atoms z1,z2,... instead of mu_{n,x}");
  auto* lyubich_cmd = measure_sub("lyubich", "inverse-branch diameters", cmd_measure_lyubich);
  lyubich_cmd->add_option("--center", ma.center, "disc center");
  lyubich_cmd->add_option("--radius", ma.radius, "disc radius");
  lyubich_cmd->add_option("--nmax", ma.n, "largest depth");
  lyubich_cmd->add_option("--branches", ma.branches, "sampled inverse branches");
  lyubich_cmd->add_option("--ell", ma.ell, "postcritical iterates checked");
  lyubich_cmd->add_option("--boundary", ma.boundary, "tracked boundary samples");

  LinearizeArgs la;
  auto* lin_cmd = app.add_subcommand("linearize", "local conjugacy series at a fixed point");
  add_common(lin_cmd, la.c);
  lin_cmd->add_option("--z0", la.z0, "fixed point (default: most attracting)");
  lin_cmd->add_option("-N,--order", la.order, "series order");
  lin_cmd->add_option("--siegel", la.siegel, "rotation number theta or 'golden'; -p quad means lambda z + z^2");
  lin_cmd->add_option("--theta", la.theta, "rotation number for --diophantine");
  lin_cmd->add_option("--diophantine", la.diophantine, "c,mu,nmax");
  lin_cmd->add_option("--cremer", la.cremer, "q1,q2,...");
  lin_cmd->add_option("--degrees", la.degrees, "degrees for the Cremer growth condition");
  lin_cmd->add_option("--epsilon", la.epsilon, "petal radius for parabolic points");
  lin_cmd->add_option("--residual-radius", la.residual_radius, "test circle for Siegel residual");
  lin_cmd->callback([&] { action = [&] { cmd_linearize(ctx, la); }; });

  DiscArgs da;
  auto* disc_cmd = app.add_subcommand("disc", "hyperbolic geometry and univalent-function checks");
  disc_cmd->require_subcommand(1);
  auto disc_sub = [&](const char* name, const char* help, void (*fn)(Context&, const DiscArgs&)) {
    auto* s = disc_cmd->add_subcommand(name, help);
    s->add_option("--seed", da.c.seed, "random seed");
    da.c.seed_opt = nullptr;
    s->add_option("--report", da.c.report, "write the JSON report to this file");
    s->callback([&, fn, s] {
      da.c.seed_opt = s->get_option("--seed");
      action = [&, fn] { fn(ctx, da); };
    });
    return s;
  };
  auto add_map = [&](CLI::App* s) {
    s->add_option("--mobius", da.mobius_t, "t for (z + t)/(1 + conj(t) z)");
    s->add_option("--blaschke", da.blaschke_zeros, "zeros a1,a2,...");
    s->add_option("--map-poly", da.poly_map, "polynomial self-map");
    s->add_option("--series", da.series, "series coefficients c0,c1,...");
    s->add_option("--rotation", da.rotation, "rotation angle in radians");
  };
  auto* dw_cmd = disc_sub("denjoy-wolff", "limit of iterates", cmd_disc_dw);
  add_map(dw_cmd);
  dw_cmd->add_option("--z0", da.z0, "starting point");
  dw_cmd->add_option("--tol", da.tol, "step tolerance");
  dw_cmd->add_option("--nmax", da.n_max, "iteration cap");
  auto* sp_cmd = disc_sub("schwarz-pick", "contraction of the Poincare distance", cmd_disc_sp);
  add_map(sp_cmd);
  sp_cmd->add_option("--pairs", da.pairs, "random pairs");
  auto* area_cmd = disc_sub("area", "area theorem sum", cmd_disc_area);
  area_cmd->add_option("--tail", da.tail, "b0,b1,... of g = 1/z + sum b_n z^n");
  auto* koebe_cmd = disc_sub("koebe", "Koebe quarter theorem", cmd_disc_koebe);
  koebe_cmd->add_option("--series", da.series, "'koebe-function' or 0,1,a2,...");
  koebe_cmd->add_option("-N,--order", da.order, "order for koebe-function");
  koebe_cmd->add_option("--resolution", da.resolution, "grid points per side");
  auto* dist_cmd = disc_sub("distortion", "Koebe distortion ratio", cmd_disc_distortion);
  dist_cmd->add_option("--series", da.series, "'koebe-function' or 0,1,a2,...");
  dist_cmd->add_option("-N,--order", da.order, "order for koebe-function");
  dist_cmd->add_option("-s", da.s, "radius s");

  try {
    const std::vector<std::string> args = expand_config(raw_args);
    std::vector<std::string> argv_store{"cdyn"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      // Help for a subcommand is reported through the same path.
      if (e.get_exit_code() == 0) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().back()->help());
        return 0;
      }
      err << "error: " << e.what() << "\n";
      return 2;
    }
    if (action) action();
    return ctx.status;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cdyn
