// Bimoment matrix I_ij = <x^i, y^j> under the coupled two-matrix weight.
#pragma once

#include <vector>

#include "bimatrix/potential.hpp"
#include "bimatrix/quadrature.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

template <class Scalar>
struct BimomentMatrix {
  Matrix<Scalar> I;   // M x M Gram matrix of (x^i, y^j)
  Scalar rel_err;     // max relative change under the last node doubling
  int order;          // outer quadrature order that was accepted
};

namespace detail {

// Gaussian moments m_j = int y^j exp(-a (y-m)^2) dy, j = 0..M-1
template <class Scalar>
void gaussian_moments(const Scalar& a, const Scalar& m, int M,
                      std::vector<Scalar>& out) {
  using std::sqrt;
  out.resize(M);
  out[0] = sqrt(pi_const<Scalar>() / a);
  if (M > 1) out[1] = m * out[0];
  for (int j = 2; j < M; ++j)
    out[j] = m * out[j - 1] + Scalar(j - 1) / (Scalar(2) * a) * out[j - 2];
}

// one pass of the bimoment computation at a fixed outer order
template <class Scalar>
Matrix<Scalar> bimoment_pass(const ValidatedModel& vm, int M, int order) {
  using std::exp;
  const Potential& v1 = vm.spec.v1;
  const Potential& v2 = vm.spec.v2;
  const Scalar s(vm.s());
  const Scalar R(vm.R);
  Matrix<Scalar> I = Matrix<Scalar>::Zero(M, M);
  const QuadRule<Scalar>& rule = gauss_legendre_cached<Scalar>(order);

  if (v2.deg() == 2) {
    // inner y-integral is an exact Gaussian: a = s g2t / 2, mean = x / g2t
    const Scalar g2t(v2.g[2]);
    const Scalar a = s * g2t / Scalar(2);
    std::vector<Scalar> mom;
    std::vector<Scalar> xpow(M);
    for (int q = 0; q < order; ++q) {
      Scalar x = R * rule.x[q];
      Scalar wq = R * rule.w[q];
      // envelope exp(-s V1 + s x^2/(2 g2t)) carries the completed square
      Scalar env = exp(-s * v1.value(x) + s * x * x / (Scalar(2) * g2t));
      gaussian_moments(a, x / g2t, M, mom);
      Scalar p(1);
      for (int i = 0; i < M; ++i) { xpow[i] = p; p *= x; }
      Scalar f = wq * env;
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) I(i, j) += f * xpow[i] * mom[j];
    }
    return I;
  }

  // generic tensorized rule on [-R, R]^2
  std::vector<Scalar> xpow(M), ypow(M);
  for (int q = 0; q < order; ++q) {
    Scalar x = R * rule.x[q];
    Scalar wx = R * rule.w[q];
    Scalar e1 = exp(-s * v1.value(x));
    Scalar p(1);
    for (int i = 0; i < M; ++i) { xpow[i] = p; p *= x; }
    for (int r = 0; r < order; ++r) {
      Scalar y = R * rule.x[r];
      Scalar wy = R * rule.w[r];
      Scalar f = wx * wy * e1 * exp(-s * v2.value(y) + s * x * y);
      p = Scalar(1);
      for (int j = 0; j < M; ++j) { ypow[j] = p; p *= y; }
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) I(i, j) += f * xpow[i] * ypow[j];
    }
  }
  return I;
}

}  // namespace detail

template <class Scalar>
BimomentMatrix<Scalar> bimoment_matrix(const ValidatedModel& vm, int M,
                                       double reltol = 1e-12) {
  using std::abs;
  if (M < 1) throw Error("InvalidArgument", "M must be >= 1");
  int order = 128;
  Matrix<Scalar> prev = detail::bimoment_pass<Scalar>(vm, M, order);
  const int nmax = 8192;
  while (order < nmax) {
    order *= 2;
    Matrix<Scalar> cur = detail::bimoment_pass<Scalar>(vm, M, order);
    Scalar scale = cur.cwiseAbs().maxCoeff();
    Scalar dev(0);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        Scalar denom = abs(cur(i, j)) > Scalar(1e-6) * scale ? abs(cur(i, j)) : scale;
        Scalar d = abs(cur(i, j) - prev(i, j)) / denom;
        if (d > dev) dev = d;
      }
    if (dev <= Scalar(reltol)) {
      BimomentMatrix<Scalar> out;
      out.I = std::move(cur);
      out.rel_err = dev;
      out.order = order;
      if (!(out.I(0, 0) > Scalar(0)))
        throw QuadratureNotConverged("I_00 not positive");
      return out;
    }
    prev = std::move(cur);
  }
  throw QuadratureNotConverged("bimoments did not stabilize under node doubling");
}

}  // namespace bimatrix
