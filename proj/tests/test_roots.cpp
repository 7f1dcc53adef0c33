#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cdyn/error.hpp"
#include "cdyn/roots.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cdyn;

namespace {

bool contains(const RootSet& r, Complex z, double tol, int mult = 0) {
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::abs(r.roots[i] - z) < tol && (mult == 0 || r.multiplicities[i] == mult)) return true;
  return false;
}

}  // namespace

TEST_CASE("all_roots examples") {
  const RootSet r = all_roots(Polynomial({-1, 0, 1}));
  CHECK(r.size() == 2);
  CHECK(r.multiplicities == std::vector<int>{1, 1});
  CHECK(contains(r, 1.0, 1e-12));
  CHECK(contains(r, -1.0, 1e-12));

  const RootSet dbl = cluster(all_roots(Polynomial({4, -4, 1})), 1e-6);
  REQUIRE(dbl.size() == 1);
  CHECK(dbl.multiplicities[0] == 2);
  CHECK(std::abs(dbl.roots[0] - 2.0) < 1e-7);

  const RootSet cube = all_roots(Polynomial({-1, 0, 0, 1}));
  CHECK(cube.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(contains(cube, std::polar(1.0, 2 * std::numbers::pi * k / 3), 1e-12));
}

TEST_CASE("all_roots errors") {
  CHECK_THROWS_AS(all_roots(Polynomial({3})), Error);
  try {
    all_roots(Polynomial({3}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeZero);
  }
  try {
    all_roots(Polynomial({1, 2, 3, 4, 5, 6, 7}), 1e-9, 1);
    FAIL("expected NonConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
  }
}

TEST_CASE("preimages examples") {
  const Polynomial sq({0, 0, 1});
  const RootSet a = preimages(sq, 1.0);
  CHECK(a.total_multiplicity() == 2);
  CHECK(contains(a, 1.0, 1e-12, 1));
  CHECK(contains(a, -1.0, 1e-12, 1));

  const RootSet b = preimages(sq, 0.0);
  REQUIRE(b.size() == 1);
  CHECK(b.multiplicities[0] == 2);
  CHECK(std::abs(b.roots[0]) < 1e-7);

  // z^2 - 1 = -1  =>  z^2 = 0 (quadratic oracle: both roots 0).
  const auto q = oracle::quadratic(1.0, 0.0, 0.0);
  const RootSet c = preimages(Polynomial({-1, 0, 1}), -1.0);
  REQUIRE(c.size() == 1);
  CHECK(c.multiplicities[0] == 2);
  CHECK(std::abs(c.roots[0] - q[0]) < 1e-7);
}

TEST_CASE("cluster examples") {
  RootSet r;
  r.roots = {Complex(1, 1e-12), Complex(1, -1e-12)};
  r.multiplicities = {1, 1};
  r.residuals = {0, 0};
  const RootSet c = cluster(r, 1e-9);
  REQUIRE(c.size() == 1);
  CHECK(c.multiplicities[0] == 2);
  CHECK(c.roots[0] == Complex(1, 0));

  r.roots = {0.0, 1.0};
  CHECK(cluster(r, 1e-9).size() == 2);

  // A chain a-b-c with a, c farther than eps still forms one cluster.
  r.roots = {0.0, Complex(0.6e-9, 0), Complex(1.2e-9, 0)};
  r.multiplicities = {1, 1, 1};
  r.residuals = {0, 0, 0};
  const RootSet chain = cluster(r, 1e-9);
  REQUIRE(chain.size() == 1);
  CHECK(chain.multiplicities[0] == 3);
  CHECK_THROWS_AS(cluster(r, 0.0), Error);
}

TEST_CASE("Vieta relations on random polynomials") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    const int d = 1 + t % 8;
    std::vector<Complex> c(static_cast<std::size_t>(d) + 1);
    for (auto& x : c) x = oracle::random_complex(rng, 1.0);
    if (std::abs(c.back()) < 0.2) c.back() += 0.5;
    const Polynomial p(c);
    const RootSet r = all_roots(p);
    REQUIRE(r.total_multiplicity() == d);
    Complex sum = 0.0, prod = 1.0;
    for (Complex z : r.roots) {
      sum += z;
      prod *= z;
    }
    const Complex want_sum = -c[d - 1] / c[d];
    const Complex want_prod = (d % 2 ? -1.0 : 1.0) * c[0] / c[d];
    CHECK(std::abs(sum - want_sum) <= 1e-8 * std::max(1.0, std::abs(want_sum)));
    CHECK(std::abs(prod - want_prod) <= 1e-8 * std::max(1.0, std::abs(want_prod)));
    CHECK(r.max_residual() < 1e-9 * p.scale());
  }
}

TEST_CASE("preimages are consistent with evaluation") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const int d = 2 + t % 4;
    std::vector<Complex> c(static_cast<std::size_t>(d) + 1);
    for (auto& x : c) x = oracle::random_complex(rng, 1.0);
    c.back() = 1.0;
    const Polynomial p(c);
    const Complex w = oracle::random_complex(rng, 3.0);
    const RootSet r = preimages(p, w);
    CHECK(r.total_multiplicity() == d);
    for (Complex z : r.roots) CHECK(std::abs(p(z) - w) < 1e-9 * std::max(p.scale(), 1 + std::abs(w)));
  }
}
