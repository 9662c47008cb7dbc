// Model definition and admissibility checks for the Hermitian two-matrix
// measure exp(-(N/T) tr[V1(M1) + V2(M2) - M1 M2]).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bimatrix/polyroots.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

// Polynomial potential in the convention V(x) = sum_{k=1}^{d+1} g_k x^k / k,
// so V'(x) = sum g_k x^{k-1}.  The constant g_0 is fixed to zero.
struct Potential {
  std::vector<double> g;  // g[k] for k = 1..deg; g[0] unused (zero)

  Potential() = default;
  // coeffs lists g_1 .. g_{d+1}
  explicit Potential(std::vector<double> coeffs) {
    g.assign(1, 0.0);
    g.insert(g.end(), coeffs.begin(), coeffs.end());
  }

  int deg() const { return static_cast<int>(g.size()) - 1; }   // deg V
  int deg_dv() const { return deg() - 1; }                     // deg V'
  double leading() const { return g.back(); }

  template <class Scalar>
  Scalar value(const Scalar& x) const {
    Scalar acc(0);
    for (int k = deg(); k >= 1; --k) acc = acc * x + Scalar(g[k]) / Scalar(k);
    return acc * x;
  }

  template <class Scalar>
  Scalar dvalue(const Scalar& x) const {
    Scalar acc(0);
    for (int k = deg(); k >= 1; --k) acc = acc * x + Scalar(g[k]);
    return acc;
  }

  // real minimizer of V(y) - x*y over y
  double argmin_coupled(double x) const {
    std::vector<double> c(g.begin() + 1, g.end());  // V'(y) coefficients
    c[0] -= x;
    std::vector<double> roots = real_roots(c);
    double best = 0.0, fbest = std::numeric_limits<double>::infinity();
    for (double y : roots) {
      double f = value(y) - x * y;
      if (f < fbest) { fbest = f; best = y; }
    }
    return best;
  }
};

struct ModelSpec {
  Potential v1, v2;
  double T = 1.0;
  int N = 1;
};

struct ValidatedModel {
  ModelSpec spec;
  int d1 = 1, d2 = 1;  // deg V1', deg V2'
  double R = 0.0;      // integration bound: weight(|x|=R) < 1e-30 * max
  double s() const { return spec.N / spec.T; }
};

namespace detail {

// effective one-variable exponent after minimizing the partner variable
inline double envelope1(const ModelSpec& m, double x) {
  double y = m.v2.argmin_coupled(x);
  return m.v1.value(x) + m.v2.value(y) - x * y;
}
inline double envelope2(const ModelSpec& m, double y) {
  double x = m.v1.argmin_coupled(y);
  return m.v1.value(x) + m.v2.value(y) - x * y;
}

}  // namespace detail

inline ValidatedModel validate_model(const ModelSpec& spec) {
  const Potential& v1 = spec.v1;
  const Potential& v2 = spec.v2;
  if (v1.deg() < 2 || v2.deg() < 2)
    throw NonHermitianModel("potential degree must be at least 2");
  if (v1.leading() == 0.0 || v2.leading() == 0.0)
    throw NonHermitianModel("vanishing leading coefficient");
  if (spec.T <= 0.0) throw NonHermitianModel("temperature must be positive");
  if (spec.N < 1) throw NonHermitianModel("matrix size must be positive");

  ValidatedModel vm;
  vm.spec = spec;
  vm.d1 = v1.deg_dv();
  vm.d2 = v2.deg_dv();

  // R x R contour: d1, d2 odd (deg V even) and positive leading coefficients
  if (vm.d1 % 2 == 0 || vm.d2 % 2 == 0)
    throw NonHermitianModel("deg V' must be odd for the real-line contour");
  if (v1.leading() <= 0.0 || v2.leading() <= 0.0)
    throw NonHermitianModel("leading coefficients must be positive");
  if (vm.d1 == 1 && vm.d2 == 1) {
    double g2 = v1.g[2], g2t = v2.g[2];
    if (!(g2 > 0.0) || !(g2 * g2t > 1.0))
      throw NonHermitianModel("quadratic form [[g2,-1],[-1,g2t]] not positive definite");
  }

  // V1(x)+V2(y)-xy bounded below: coarse-grid minimum attained in the interior
  {
    double L = 8.0;
    int n = 81;
    double fmin = std::numeric_limits<double>::infinity();
    bool interior = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double x = -L + 2 * L * i / (n - 1);
        double y = -L + 2 * L * j / (n - 1);
        double f = v1.value(x) + v2.value(y) - x * y;
        if (f < fmin) {
          fmin = f;
          interior = (i > 0 && i < n - 1 && j > 0 && j < n - 1);
        }
      }
    if (!interior)
      throw NonHermitianModel("V1(x)+V2(y)-xy has no interior minimum on the grid");
  }

  // integration bound: scan the coupled envelope until the weight drops
  // below 1e-30 of its maximum in both directions
  {
    double target = std::log(1e30) * spec.T / spec.N;
    double m1 = std::numeric_limits<double>::infinity();
    double m2 = m1;
    for (int i = 0; i <= 200; ++i) {
      double x = -10.0 + 20.0 * i / 200.0;
      m1 = std::min(m1, detail::envelope1(spec, x));
      m2 = std::min(m2, detail::envelope2(spec, x));
    }
    double mstar = std::min(m1, m2);
    double R = 0.5;
    while (R < 1e4) {
      bool ok = detail::envelope1(spec, R) - mstar > target &&
                detail::envelope1(spec, -R) - mstar > target &&
                detail::envelope2(spec, R) - mstar > target &&
                detail::envelope2(spec, -R) - mstar > target;
      if (ok) break;
      R *= 1.05;
    }
    vm.R = R;
  }
  return vm;
}

// reference Gaussian model V1 = x^2, V2 = y^2 (g2 = g2t = 2)
inline ModelSpec gaussian_model(int N, double T = 1.0) {
  ModelSpec m;
  m.v1 = Potential({0.0, 2.0});
  m.v2 = Potential({0.0, 2.0});
  m.T = T;
  m.N = N;
  return m;
}

// V1 = x^2 + t x^4 / 4, V2 = y^2
inline ModelSpec quartic_model(int N, double t, double T = 1.0) {
  ModelSpec m;
  m.v1 = Potential({0.0, 2.0, 0.0, t});
  m.v2 = Potential({0.0, 2.0});
  m.T = T;
  m.N = N;
  return m;
}

}  // namespace bimatrix
