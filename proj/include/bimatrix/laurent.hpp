// Truncated Laurent series in one variable with explicit order tracking.
// Products of the finite curve data are exact; only inversion introduces a
// tracked truncation order.
#pragma once

#include <vector>

#include "bimatrix/types.hpp"

namespace bimatrix {

struct Laurent {
  int lo = 0;              // lowest power
  int hi = -1;             // highest power known to be valid
  std::vector<double> c;   // coefficients of t^{lo} .. t^{lo+len-1}

  static Laurent zero() { return Laurent{0, 1 << 28, {}}; }

  static Laurent monomial(double v, int k) {
    return Laurent{k, 1 << 28, {v}};
  }

  double coeff(int k) const {
    if (k < lo || k >= lo + static_cast<int>(c.size())) return 0.0;
    return c[k - lo];
  }

  bool is_zero() const {
    for (double v : c)
      if (v != 0.0) return false;
    return true;
  }

  Laurent& trim() {
    int a = 0, b = static_cast<int>(c.size());
    while (a < b && c[a] == 0.0) ++a;
    while (b > a && c[b - 1] == 0.0) --b;
    if (a == b) { c.clear(); lo = 0; return *this; }
    c = std::vector<double>(c.begin() + a, c.begin() + b);
    lo += a;
    return *this;
  }
};

inline Laurent operator+(const Laurent& f, const Laurent& g) {
  if (f.c.empty()) return Laurent{g.lo, std::min(f.hi, g.hi), g.c};
  if (g.c.empty()) return Laurent{f.lo, std::min(f.hi, g.hi), f.c};
  int lo = std::min(f.lo, g.lo);
  int top = std::max(f.lo + static_cast<int>(f.c.size()),
                     g.lo + static_cast<int>(g.c.size()));
  Laurent out{lo, std::min(f.hi, g.hi), std::vector<double>(top - lo, 0.0)};
  for (size_t i = 0; i < f.c.size(); ++i) out.c[f.lo - lo + i] += f.c[i];
  for (size_t i = 0; i < g.c.size(); ++i) out.c[g.lo - lo + i] += g.c[i];
  return out;
}

inline Laurent operator-(const Laurent& f, const Laurent& g) {
  Laurent ng = g;
  for (double& v : ng.c) v = -v;
  return f + ng;
}

inline Laurent operator*(const Laurent& f, const Laurent& g) {
  const int big = 1 << 28;
  if (f.c.empty() || g.c.empty()) return Laurent{0, big, {}};
  // power k is exact iff no truncated coefficient can reach it:
  // k <= f.hi + g.lo and k <= g.hi + f.lo
  int hi = big;
  if (f.hi < big) hi = std::min(hi, f.hi + g.lo);
  if (g.hi < big) hi = std::min(hi, g.hi + f.lo);
  Laurent out{f.lo + g.lo, hi,
              std::vector<double>(f.c.size() + g.c.size() - 1, 0.0)};
  for (size_t i = 0; i < f.c.size(); ++i)
    for (size_t j = 0; j < g.c.size(); ++j) out.c[i + j] += f.c[i] * g.c[j];
  if (out.hi < out.lo + static_cast<int>(out.c.size()) - 1) {
    if (out.hi < out.lo) out.c.clear();
    else out.c.resize(out.hi - out.lo + 1);
  }
  return out;
}

inline Laurent operator*(double s, const Laurent& f) {
  Laurent out = f;
  for (double& v : out.c) v *= s;
  return out;
}

// series inverse 1/f with nterms coefficients, f.c[0] != 0
inline Laurent laurent_inverse(const Laurent& f, int nterms) {
  Laurent g = f;
  g.trim();
  if (g.c.empty()) throw Error("LaurentError", "inverting the zero series");
  Laurent out{-g.lo, -g.lo + nterms - 1, std::vector<double>(nterms, 0.0)};
  out.c[0] = 1.0 / g.c[0];
  for (int k = 1; k < nterms; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k && j < static_cast<int>(g.c.size()); ++j)
      acc += g.c[j] * out.c[k - j];
    out.c[k] = -acc / g.c[0];
  }
  out.hi = std::min(out.hi, f.hi - 2 * g.lo);
  return out;
}

// d/dt
inline Laurent laurent_derivative(const Laurent& f) {
  Laurent out{f.lo - 1, f.hi - 1, std::vector<double>(f.c.size(), 0.0)};
  for (size_t i = 0; i < f.c.size(); ++i)
    out.c[i] = f.c[i] * (f.lo + static_cast<int>(i));
  return out.trim();
}

inline Laurent laurent_pow(const Laurent& f, int k) {
  Laurent out = Laurent::monomial(1.0, 0);
  for (int i = 0; i < k; ++i) out = out * f;
  return out;
}

inline double laurent_residue(const Laurent& f) { return f.coeff(-1); }

}  // namespace bimatrix
