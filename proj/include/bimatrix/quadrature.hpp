// Gauss-Legendre rules templated on the scalar type.
#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "bimatrix/types.hpp"

namespace bimatrix {

template <class Scalar>
struct QuadRule {
  Vector<Scalar> x, w;  // nodes and weights on [-1, 1]
  int size() const { return static_cast<int>(x.size()); }
};

namespace detail {

// P_n(t) and P_n'(t) by the three-term recurrence
template <class Scalar>
void legendre_eval(int n, const Scalar& t, Scalar& p, Scalar& dp) {
  Scalar p0(1), p1 = t;
  for (int k = 2; k <= n; ++k) {
    Scalar p2 = (Scalar(2 * k - 1) * t * p1 - Scalar(k - 1) * p0) / Scalar(k);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = Scalar(n) * (t * p1 - p0) / (t * t - Scalar(1));
}

}  // namespace detail

template <class Scalar>
QuadRule<Scalar> gauss_legendre(int n) {
  QuadRule<Scalar> rule;
  rule.x.resize(n);
  rule.w.resize(n);
  using std::abs;
  using std::cos;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon() * Scalar(16);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar t(std::cos(M_PI * (i + 0.75) / (n + 0.5)));
    Scalar p, dp;
    for (int it = 0; it < 100; ++it) {
      detail::legendre_eval(n, t, p, dp);
      Scalar dt = p / dp;
      t -= dt;
      if (abs(dt) < eps) break;
    }
    detail::legendre_eval(n, t, p, dp);
    rule.x[i] = -t;
    rule.x[n - 1 - i] = t;
    Scalar w = Scalar(2) / ((Scalar(1) - t * t) * dp * dp);
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = Scalar(0);
  return rule;
}

// cached rule mapped onto [a, b]
template <class Scalar>
const QuadRule<Scalar>& gauss_legendre_cached(int n) {
  static std::map<int, QuadRule<Scalar>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre<Scalar>(n)).first;
  return it->second;
}

template <class Scalar, class F>
Scalar integrate(const F& f, const Scalar& a, const Scalar& b, int n) {
  const QuadRule<Scalar>& r = gauss_legendre_cached<Scalar>(n);
  Scalar half = (b - a) / Scalar(2), mid = (b + a) / Scalar(2);
  Scalar acc(0);
  for (int i = 0; i < n; ++i) acc += r.w[i] * f(mid + half * r.x[i]);
  return acc * half;
}

// doubles the order until the value stabilizes to reltol
template <class Scalar, class F>
Scalar integrate_adaptive(const F& f, const Scalar& a, const Scalar& b,
                          double reltol, int n0 = 64, int nmax = 8192) {
  using std::abs;
  Scalar prev = integrate(f, a, b, n0);
  for (int n = 2 * n0; n <= nmax; n *= 2) {
    Scalar cur = integrate(f, a, b, n);
    Scalar scale = abs(cur) > Scalar(0) ? abs(cur) : Scalar(1);
    if (abs(cur - prev) <= Scalar(reltol) * scale) return cur;
    prev = cur;
  }
  throw QuadratureNotConverged("1d integral did not stabilize under node doubling");
}

}  // namespace bimatrix
