#include "cdyn/series.hpp"

#include <algorithm>
#include <cstdio>

#include "cdyn/error.hpp"

namespace cdyn {

PowerSeries::PowerSeries(int order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "series order must be >= 1");
  coeffs_.assign(static_cast<std::size_t>(order) + 1, Complex{});
}

PowerSeries::PowerSeries(std::vector<Complex> coeffs, double radius_hint)
    : coeffs_(std::move(coeffs)), radius_hint_(radius_hint) {
  if (coeffs_.size() < 2) coeffs_.resize(2);
}

PowerSeries PowerSeries::identity(int order) {
  PowerSeries s(order);
  s[1] = 1.0;
  return s;
}

PowerSeries PowerSeries::from_polynomial(const Polynomial& p, int order) {
  PowerSeries s(order);
  for (int k = 0; k <= std::min(order, p.degree()); ++k) s[k] = p[k];
  return s;
}

Complex PowerSeries::operator()(Complex z) const noexcept {
  Complex acc = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

PowerSeries PowerSeries::derivative() const {
  PowerSeries d(order());
  for (int k = 1; k <= order(); ++k) d[k - 1] = static_cast<double>(k) * (*this)[k];
  return d;
}

PowerSeries PowerSeries::truncated(int order) const {
  PowerSeries t(order);
  for (int k = 0; k <= std::min(order, this->order()); ++k) t[k] = (*this)[k];
  t.radius_hint_ = radius_hint_;
  return t;
}

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
  PowerSeries r(std::min(a.order(), b.order()));
  for (int k = 0; k <= r.order(); ++k) r[k] = a[k] + b[k];
  return r;
}

PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) { return a + Complex(-1.0) * b; }

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  const int n = std::min(a.order(), b.order());
  PowerSeries r(n);
  for (int i = 0; i <= n; ++i) {
    if (a[i] == Complex{}) continue;
    for (int j = 0; i + j <= n; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

PowerSeries operator*(Complex s, const PowerSeries& a) {
  PowerSeries r = a;
  for (int k = 0; k <= r.order(); ++k) r[k] *= s;
  return r;
}

PowerSeries PowerSeries::pow(int k) const {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative series power");
  PowerSeries result(order());
  result[0] = 1.0;
  PowerSeries base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

PowerSeries PowerSeries::compose(const PowerSeries& inner) const {
  if (inner[0] != Complex{}) throw Error(ErrorCode::InvalidArgument, "inner series must vanish at 0");
  const int n = std::min(order(), inner.order());
  const PowerSeries g = inner.truncated(n);
  PowerSeries acc(n);
  acc[0] = (*this)[n];
  for (int k = n - 1; k >= 0; --k) {
    acc = acc * g;
    acc[0] += (*this)[k];
  }
  return acc;
}

PowerSeries PowerSeries::inverse() const {
  if ((*this)[0] != Complex{} || (*this)[1] == Complex{})
    throw Error(ErrorCode::InvalidArgument, "series inverse needs f(0) = 0 and f'(0) != 0");
  const int n = order();
  const Complex lead = (*this)[1];
  PowerSeries g(n);
  g[1] = 1.0 / lead;
  // Fix one more coefficient of f(g(z)) = z per pass.
  for (int k = 2; k <= n; ++k) {
    const PowerSeries fg = compose(g.truncated(n));
    g[k] -= fg[k] / lead;
  }
  return g;
}

std::string series_csv(const PowerSeries& s) {
  std::string out = "k,re,im\n";
  char buf[96];
  for (int k = 0; k <= s.order(); ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", k, s[k].real(), s[k].imag());
    out += buf;
  }
  return out;
}

}  // namespace cdyn
