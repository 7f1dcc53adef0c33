#pragma once

#include <string>
#include <vector>

#include "cdyn/core.hpp"

namespace cdyn {

/// Truncated power series c_0 + c_1 z + ... + c_N z^N. All arithmetic
/// truncates at the smaller operand order.
class PowerSeries {
 public:
  PowerSeries() : coeffs_(2) {}
  /// Zero series of order N.
  explicit PowerSeries(int order);
  explicit PowerSeries(std::vector<Complex> coeffs, double radius_hint = 0.0);

  static PowerSeries identity(int order);
  static PowerSeries from_polynomial(const Polynomial& p, int order);

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
  Complex& operator[](int k) { return coeffs_.at(static_cast<std::size_t>(k)); }
  Complex operator[](int k) const noexcept {
    return k >= 0 && k <= order() ? coeffs_[static_cast<std::size_t>(k)] : Complex{};
  }

  double radius_hint() const noexcept { return radius_hint_; }
  void set_radius_hint(double r) noexcept { radius_hint_ = r; }

  Complex operator()(Complex z) const noexcept;
  PowerSeries derivative() const;
  PowerSeries truncated(int order) const;
  PowerSeries pow(int k) const;

  /// f(g(z)); requires g(0) = 0.
  PowerSeries compose(const PowerSeries& inner) const;
  /// Compositional inverse; requires c_0 = 0 and c_1 != 0.
  PowerSeries inverse() const;

  friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator*(Complex s, const PowerSeries& a);

 private:
  std::vector<Complex> coeffs_;
  double radius_hint_ = 0.0;
};

/// CSV with header "k,re,im", one row per coefficient.
std::string series_csv(const PowerSeries& s);

}  // namespace cdyn
