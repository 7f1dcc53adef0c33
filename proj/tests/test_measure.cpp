#include <cmath>
#include <numbers>
#include <random>

#include "cdyn/error.hpp"
#include "cdyn/measure.hpp"
#include "cdyn/orbits.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cdyn;

namespace {

const Polynomial kSquare({0.0, 0.0, 1.0});

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::AssertionFailed;
}

TestFunction re_z() { return finite_function("Re z", [](Complex z) { return Complex(z.real()); }); }
TestFunction abs2() { return finite_function("|z|^2", [](Complex z) { return Complex(std::norm(z)); }); }
TestFunction bump() {
  return finite_function("1/(1+|z|^2)", [](Complex z) { return Complex(1.0 / (1.0 + std::norm(z))); }, 0.0);
}

}  // namespace

TEST_CASE("empirical measure bookkeeping") {
  EmpiricalMeasure m({{1.0, 0.5}, {Complex(1.0 + 1e-12), 0.5}, {SpherePoint::infinity(), 1.0}});
  const EmpiricalMeasure n = m.normalized();
  CHECK(n.size() == 2);
  CHECK(std::abs(n.mass() - 1.0) < 1e-15);
  CHECK(measure_csv(EmpiricalMeasure({{SpherePoint::infinity(), 1.0}})) == "re,im,weight\ninf,inf,1\n");
  CHECK(measure_csv(EmpiricalMeasure({{Complex(0.5, -1.0), 0.25}})) == "re,im,weight\n0.5,-1,0.25\n");
  const EmpiricalMeasure a({{0.0, 1.0}});
  const EmpiricalMeasure b({{1.0, 1.0}});
  CHECK(total_variation(a, b) == 2.0);
  CHECK(total_variation(a, a) == 0.0);
  CHECK(same_measure(a, EmpiricalMeasure({{Complex(1e-10), 1.0}})));
  CHECK_FALSE(same_measure(a, b));
}

TEST_CASE("pullback") {
  const EmpiricalMeasure one = pullback(kSquare, EmpiricalMeasure::dirac(1.0)).merged();
  CHECK(one.size() == 2);
  CHECK(one.mass() == doctest::Approx(2.0));
  CHECK(same_measure(one, EmpiricalMeasure({{1.0, 1.0}, {-1.0, 1.0}})));

  const EmpiricalMeasure zero = pullback(kSquare, EmpiricalMeasure::dirac(0.0)).merged();
  REQUIRE(zero.size() == 1);
  CHECK(std::abs(zero.atoms()[0].point.value()) < 1e-12);
  CHECK(zero.atoms()[0].weight == doctest::Approx(2.0));

  const EmpiricalMeasure inf = pullback(kSquare, EmpiricalMeasure::dirac(SpherePoint::infinity()));
  REQUIRE(inf.size() == 1);
  CHECK(inf.atoms()[0].point.is_infinite());
  CHECK(inf.atoms()[0].weight == 2.0);

  for (Complex c : {Complex(0.0), Complex(-1.0), Complex(0.0, 1.0)}) {
    const Polynomial p({c, 0.0, 1.0});
    for (int n = 0; n <= 8; ++n) {
      const EmpiricalMeasure mu = mu_nx(p, Complex(2.0, 0.5), n, 0);
      const EmpiricalMeasure next = mu_nx(p, Complex(2.0, 0.5), n + 1, 0);
      const EmpiricalMeasure pulled = pullback(p, mu);
      CHECK(pulled.mass() == doctest::Approx(2.0));
      CHECK(same_measure(pulled.normalized(), next, 1e-8, 1e-12));
    }
  }
}

TEST_CASE("mu_nx") {
  const EmpiricalMeasure m = mu_nx(kSquare, 1.0, 3, 0);
  REQUIRE(m.size() == 8);
  const auto tree = oracle::square_root_tree(1.0, 3);
  for (const Atom& a : m.atoms()) {
    CHECK(a.weight == doctest::Approx(0.125));
    double best = 1.0;
    for (Complex r : tree) best = std::min(best, std::abs(r - a.point.value()));
    CHECK(best < 1e-12);
  }
  const EmpiricalMeasure zero = mu_nx(kSquare, 0.0, 2, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero.atoms()[0].weight == doctest::Approx(1.0));
  const EmpiricalMeasure inf = mu_nx(kSquare, SpherePoint::infinity(), 5, 0);
  REQUIRE(inf.size() == 1);
  CHECK(inf.atoms()[0].point.is_infinite());

  // Sampled mode: budget below d^n.
  MeasureOptions opts;
  opts.budget = 500;
  const EmpiricalMeasure s = mu_nx(kSquare, 2.0, 12, 9, opts);
  CHECK(s.size() == 500);
  CHECK(std::abs(s.mass() - 1.0) < 1e-12);
  for (const Atom& a : s.atoms()) CHECK(std::abs(std::abs(a.point.value()) - std::pow(2.0, std::ldexp(1.0, -12))) < 1e-12);
  opts.tasks = 3;
  const EmpiricalMeasure s3 = mu_nx(kSquare, 2.0, 12, 9, opts);
  const EmpiricalMeasure s3b = mu_nx(kSquare, 2.0, 12, 9, opts);
  CHECK(measure_csv(s3) == measure_csv(s3b));
}

TEST_CASE("cesaro") {
  const Complex x(0.3, 0.7);
  const Polynomial p({Complex(-0.1, 0.2), 0.0, 1.0});
  CHECK(same_measure(cesaro(p, x, 1, 0), mu_nx(p, x, 1, 0)));
  const auto seq = cesaro_sequence(p, x, 10);
  for (int n = 1; n < 10; ++n) {
    const double tv = total_variation(seq[static_cast<std::size_t>(n)], seq[static_cast<std::size_t>(n) - 1]);
    CHECK(tv <= 2.0 / (n + 1) + 1e-9);
  }
  // Concentration on the unit circle for z^2, x = 2.
  const TestFunction off = finite_function("|1-|z||", [](Complex z) { return Complex(std::abs(1.0 - std::abs(z))); });
  double prev = 1e9;
  for (int n : {2, 6, 12}) {
    const double v = integrate(cesaro(kSquare, 2.0, n, 0), off).real();
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("integrate and pushforward") {
  CHECK(integrate(EmpiricalMeasure::dirac(0.0), re_z()) == Complex(0.0));
  const EmpiricalMeasure eighth = mu_nx(kSquare, 1.0, 3, 0);
  CHECK(std::abs(integrate(eighth, re_z())) < 1e-15);
  CHECK(std::abs(integrate(eighth, abs2()) - 1.0) < 1e-14);
  CHECK(code_of([] { integrate(EmpiricalMeasure::dirac(SpherePoint::infinity()), re_z()); }) ==
        ErrorCode::UndefinedAtAtom);
  CHECK(integrate(EmpiricalMeasure::dirac(SpherePoint::infinity()), bump()) == Complex(0.0));

  const TestFunction one = finite_function("1", [](Complex) { return Complex(1.0); }, 1.0);
  std::mt19937_64 rng(3);
  const Polynomial cubic({1.0, Complex(0.0, 2.0), -1.0, 0.5});
  for (int i = 0; i < 10; ++i) {
    const Complex z = oracle::random_complex(rng, 3.0);
    CHECK(std::abs(pushforward_fn(cubic, one)(z) - 3.0) < 1e-12);
    CHECK(std::abs(pushforward_fn(kSquare, re_z())(z)) < 1e-12);
    CHECK(std::abs(pushforward_fn(kSquare, abs2())(z) - 2.0 * std::abs(z)) < 1e-12);
  }
  CHECK(pushforward_fn(cubic, one)(SpherePoint::infinity()) == Complex(3.0));
}

TEST_CASE("duality") {
  CHECK(duality_residual(kSquare, re_z(), EmpiricalMeasure::dirac(1.0)) < 1e-15);
  CHECK(duality_residual(kSquare, abs2(), EmpiricalMeasure::dirac(0.0)) < 1e-15);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> deg(2, 3);
  for (int i = 0; i < 100; ++i) {
    std::vector<Complex> c;
    const int d = deg(rng);
    for (int k = 0; k <= d; ++k) c.push_back(oracle::random_complex(rng, 1.0));
    if (std::abs(c.back()) < 0.2) c.back() = 1.0;
    const Polynomial p(c);
    EmpiricalMeasure nu;
    for (int k = 0; k < 5; ++k) nu.add(oracle::random_complex(rng, 2.0), 0.2);
    for (const TestFunction& phi : {bump(), re_z(), abs2()})
      CHECK(duality_residual(p, phi, nu) < 1e-8);
  }
}

TEST_CASE("weak gap") {
  const GapReport g = weak_gap(kSquare, 2.0, 3.0, 12, default_panel(), 0);
  CHECK(g.exact);
  CHECK(g.gap < 0.02);
  CHECK(g.entries.size() == 6);
  CHECK(weak_gap(kSquare, 2.0, 2.0, 8, default_panel(), 0).gap == 0.0);
  CHECK(code_of([] { weak_gap(kSquare, 0.0, 2.0, 4, default_panel(), 0); }) ==
        ErrorCode::ExceptionalBasepoint);

  // Decay in n for z^2 + c, x = 5, y = 7 (exact mode).
  for (Complex c : {Complex(0.0), Complex(-1.0), Complex(0.0, 1.0)}) {
    const Polynomial p({c, 0.0, 1.0});
    double prev = 1e9;
    for (int n : {2, 5, 8, 11}) {
      const double gap = weak_gap(p, 5.0, 7.0, n, default_panel(), 0).gap;
      CHECK(gap <= prev + 1e-9);
      prev = gap;
    }
    CHECK(prev < 0.05);
  }

  MeasureOptions opts;
  opts.budget = 2000;
  const GapReport s = weak_gap(kSquare, 2.0, 3.0, 14, default_panel(), 5, opts);
  CHECK_FALSE(s.exact);
  CHECK(s.std_error > 0.0);
  CHECK(s.gap < 6 * s.std_error + 1e-3);
}

TEST_CASE("equilibrium properties") {
  const Polynomial p({Complex(-0.5, 0.3), 0.0, 1.0});
  const std::vector<TestFunction> panel = default_panel();
  double prev = 1e9;
  for (int n : {3, 7, 11}) {
    const EmpiricalMeasure mu = mu_nx(p, 2.0, n, 0);
    const double gap = panel_distance(pullback(p, mu).normalized(), mu, panel);
    CHECK(gap < prev);
    prev = gap;
  }
  // (P^n)^* nu / d^n approaches the x-based measure.
  const EmpiricalMeasure nu({{Complex(1.5, 1.0), 0.3}, {Complex(-2.0), 0.3}, {Complex(0.0, 3.0), 0.4}});
  const EmpiricalMeasure ref = mu_nx(p, 2.0, 12, 0);
  prev = 1e9;
  for (int n : {2, 6, 10}) {
    const double dist = panel_distance(normalized_pullback(p, nu, n), ref, panel);
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("mixing and ergodicity") {
  const EmpiricalMeasure mu = mu_nx(kSquare, 1.0, 12, 0);
  const TestFunction one = finite_function("1", [](Complex) { return Complex(1.0); }, 1.0);
  for (int n = 1; n <= 6; ++n) {
    CHECK(std::abs(mixing_correlation(kSquare, re_z(), re_z(), n, mu)) < 0.02);
    CHECK(std::abs(mixing_correlation(kSquare, re_z(), one, n, mu)) < 1e-12);
  }
  const TestFunction upper = upper_half_indicator();
  CHECK(std::abs(joint_integral(kSquare, upper, upper, 3, mu).real() - 0.25) < 0.02);

  const ErgodicityReport all = ergodicity_check(kSquare, one, mu);
  CHECK(all.mass == doctest::Approx(1.0));
  CHECK(all.invariant);
  CHECK(all.consistent);
  const TestFunction none = finite_function("0", [](Complex) { return Complex(0.0); }, 0.0);
  const ErgodicityReport empty = ergodicity_check(kSquare, none, mu);
  CHECK(empty.mass == 0.0);
  CHECK(empty.invariant);
  CHECK(empty.consistent);
  const ErgodicityReport half = ergodicity_check(kSquare, upper, mu);
  CHECK_FALSE(half.invariant);
  CHECK(std::abs(half.mass - 0.5) < 1e-3);
  CHECK(half.mixing_gap < 0.02);
  CHECK_THROWS_AS(ergodicity_check(kSquare, re_z(), mu), Error);
}

TEST_CASE("lyubich diameters") {
  const LyubichReport r = lyubich_diameters(kSquare, 2.0, 0.1, 6, 200, 1);
  CHECK(std::abs(r.levels[0].mean_log_diameter - std::log(0.2)) < 1e-13);
  CHECK(r.levels[0].median_diameter == 0.2);
  // Branches of z^{1/2^n} at 2: diameter ~ 0.2 * 2^{1/2^n - 1} / 2^n.
  for (int n = 1; n <= 6; ++n) {
    const double expect = 0.2 * std::pow(2.0, std::ldexp(1.0, -n) - 1.0) * std::ldexp(1.0, -n);
    CHECK(std::abs(r.levels[static_cast<std::size_t>(n)].median_diameter / expect - 1.0) < 0.05);
  }
  CHECK(r.target_slope == doctest::Approx(-0.5 * std::log(2.0)));
  CHECK(r.fraction_below >= 0.9);

  const auto v = postcritical_points(Polynomial({-1.0, 0.0, 1.0}), 20);
  CHECK(v.size() == 20);
  CHECK(code_of([] { lyubich_diameters(Polynomial({-1.0, 0.0, 1.0}), -0.5, 0.6, 4, 10, 1); }) ==
        ErrorCode::PostcriticalOverlap);

  LyubichOptions opts;
  opts.tasks = 2;
  const LyubichReport a = lyubich_diameters(Polynomial({-1.0, 0.0, 1.0}), 3.0, 0.05, 5, 100, 4, opts);
  const LyubichReport b = lyubich_diameters(Polynomial({-1.0, 0.0, 1.0}), 3.0, 0.05, 5, 100, 4, opts);
  CHECK(a.slope == b.slope);
  CHECK(a.fitted_c == b.fitted_c);
}
