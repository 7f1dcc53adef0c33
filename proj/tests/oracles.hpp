#pragma once
// Independent reference computations used only by the tests. Nothing here
// calls into the library's numerical kernels.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using C = std::complex<double>;

/// Both roots of a z^2 + b z + c by the quadratic formula.
inline std::array<C, 2> quadratic(C a, C b, C c) {
  const C disc = std::sqrt(b * b - 4.0 * a * c);
  return {(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)};
}

/// Sum a_k z^k by explicit powers.
inline C power_sum(const std::vector<C>& a, C z) {
  C acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * std::pow(z, static_cast<double>(k));
  return acc;
}

inline std::vector<C> poly_mul(const std::vector<C>& p, const std::vector<C>& q) {
  std::vector<C> r(p.size() + q.size() - 1);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

/// P(Q(z)) expanded as sum a_k Q^k with repeated products.
inline std::vector<C> expand_composition(const std::vector<C>& p, const std::vector<C>& q) {
  std::vector<C> result{0.0};
  std::vector<C> power{1.0};
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (result.size() < power.size()) result.resize(power.size());
    for (std::size_t j = 0; j < power.size(); ++j) result[j] += p[k] * power[j];
    power = poly_mul(power, q);
  }
  return result;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// The 2^n preimages of x under z^2 by repeated principal square roots and sign flips.
inline std::vector<C> square_root_tree(C x, int n) {
  std::vector<C> level{x};
  for (int k = 0; k < n; ++k) {
    std::vector<C> next;
    for (C w : level) {
      const C r = std::sqrt(w);
      next.push_back(r);
      next.push_back(-r);
    }
    level = std::move(next);
  }
  return level;
}

inline C random_complex(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {u(rng), u(rng)};
}

}  // namespace oracle

namespace oracle {

/// lambda^{-n} P^n(z), the limit form of the Koenigs coordinate.
inline C koenigs_limit(const std::vector<C>& p, C lambda, C z, int n) {
  for (int k = 0; k < n; ++k) z = power_sum(p, z);
  return z / std::pow(lambda, static_cast<double>(n));
}

/// Boettcher coordinate of z^p (1 + ...) near 0 as the telescoping product
/// z prod_j (z_{j+1} / z_j^p)^{1/p^{j+1}}, principal branches near 1.
inline C boettcher_product(const std::vector<C>& a, int p, C z, int n) {
  C acc = z;
  double expo = 1.0 / p;
  for (int j = 0; j < n; ++j) {
    const C next = power_sum(a, z);
    acc *= std::pow(next / std::pow(z, static_cast<double>(p)), expo);
    z = next;
    expo /= p;
    if (std::abs(z) < 1e-150) break;
  }
  return acc;
}

/// |e^{2 pi i x} - 1| straight from the exponential.
inline double unit_gap(double x) {
  return std::abs(std::exp(C(0.0, 2.0 * std::numbers::pi * x)) - 1.0);
}

}  // namespace oracle
