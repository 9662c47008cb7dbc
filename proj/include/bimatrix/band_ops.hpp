// Multiplication operators Q (by x) and P (by y) in the wave-function
// basis, with the string equation and Heisenberg relation checks.
#pragma once

#include <utility>

#include "bimatrix/biortho.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

template <class Scalar>
struct BandOperator {
  Matrix<Scalar> m;      // full truncated matrix including any leakage
  int sub = 1;           // declared lower bandwidth: d2 for Q, d1 for P
  int valid_rows = 0;    // rows [0, valid_rows) are exact
  Vector<Scalar> gamma;  // gamma_n = sqrt(h_{n+1}/h_n)

  int size() const { return static_cast<int>(m.rows()); }
};

namespace detail {

// expand x * row n of the monic coefficient table over the family rows
template <class Scalar>
void reexpand_row(const Matrix<Scalar>& table, int n, Vector<Scalar>& c) {
  const int M = static_cast<int>(table.rows());
  Vector<Scalar> v = Vector<Scalar>::Zero(M + 1);
  for (int k = 0; k <= n; ++k) v[k + 1] = table(n, k);  // x * pi_n
  c.setZero(M);
  for (int m = n + 1; m >= 0; --m) {
    Scalar coeff = v[m];
    c[m] = coeff;
    if (coeff != Scalar(0))
      for (int k = 0; k <= m; ++k) v[k] -= coeff * table(m, k);
  }
}

}  // namespace detail

template <class Scalar>
std::pair<BandOperator<Scalar>, BandOperator<Scalar>> build_Q_P(
    const BiorthogonalFamily<Scalar>& fam, const ValidatedModel& vm) {
  using std::sqrt;
  const int M = fam.max_degree + 1;
  if (M < vm.d1 + vm.d2 + 5)
    throw TruncationTooSmall("family shorter than d1 + d2 + 4");
  BandOperator<Scalar> Q, P;
  Q.sub = vm.d2;
  P.sub = vm.d1;
  Q.m = Matrix<Scalar>::Zero(M, M);
  P.m = Matrix<Scalar>::Zero(M, M);
  Q.valid_rows = P.valid_rows = M - 1;
  Q.gamma.resize(M - 1);
  for (int n = 0; n + 1 < M; ++n) Q.gamma[n] = sqrt(fam.h[n + 1] / fam.h[n]);
  P.gamma = Q.gamma;

  Vector<Scalar> c;
  for (int n = 0; n + 1 < M; ++n) {
    detail::reexpand_row(fam.pi, n, c);
    for (int m = 0; m <= n + 1; ++m)
      Q.m(n, m) = c[m] * sqrt(fam.h[m] / fam.h[n]);
    detail::reexpand_row(fam.sigma, n, c);
    for (int m = 0; m <= n + 1; ++m)
      P.m(n, m) = c[m] * sqrt(fam.h[m] / fam.h[n]);
  }
  return {std::move(Q), std::move(P)};
}

// worst out-of-band to in-band ratio over interior rows
template <class Scalar>
double band_leakage(const BandOperator<Scalar>& op) {
  using std::abs;
  Scalar inband(0), outband(0);
  for (int n = 0; n < op.valid_rows; ++n)
    for (int m = 0; m < op.size(); ++m) {
      Scalar a = abs(op.m(n, m));
      if (m > n + 1 || m < n - op.sub) outband = std::max(outband, a);
      else inband = std::max(inband, a);
    }
  return to_double(outband / inband);
}

// matrix polynomial dV(Q) by Horner; rows [0, M - deg) are exact
template <class Scalar>
Matrix<Scalar> poly_of_operator(const Potential& v,
                                const Matrix<Scalar>& Q) {
  const int M = static_cast<int>(Q.rows());
  Matrix<Scalar> acc = Matrix<Scalar>::Zero(M, M);
  acc.diagonal().array() += Scalar(v.g[v.deg()]);
  for (int k = v.deg() - 1; k >= 1; --k) {
    acc = (acc * Q).eval();
    acc.diagonal().array() += Scalar(v.g[k]);
  }
  return acc;
}

struct ResidualReport {
  double max_dev = 0.0;
  int lo = 0, hi = 0;  // interior row window used
};

// (P^t)_{nm} = V1'(Q)_{nm} for m >= n, and
// (P^t)_{n,n-1} = V1'(Q)_{n,n-1} - T n / (N gamma_{n-1}); plus the same with
// the roles of Q and P swapped.
template <class Scalar>
ResidualReport string_equation_residual(const BandOperator<Scalar>& Q,
                                        const BandOperator<Scalar>& P,
                                        const ValidatedModel& vm) {
  using std::abs;
  const int M = Q.size();
  Matrix<Scalar> dv1q = poly_of_operator(vm.spec.v1, Q.m);
  Matrix<Scalar> dv2p = poly_of_operator(vm.spec.v2, P.m);
  ResidualReport rep;
  rep.lo = vm.d1 + vm.d2 + 1;
  rep.hi = M - std::max(vm.d1, vm.d2) - 2;
  Scalar dev(0), scale(1);
  for (int n = rep.lo; n < rep.hi; ++n) {
    for (int m = n - 1; m <= std::min(M - 1, n + vm.d1 + 1); ++m) {
      Scalar lhs = P.m(m, n);  // (P^t)_{n,m}
      Scalar rhs = dv1q(n, m);
      if (m == n - 1) rhs -= Scalar(vm.spec.T * n) / (Scalar(vm.spec.N) * Q.gamma[n - 1]);
      dev = std::max(dev, abs(lhs - rhs));
      scale = std::max(scale, abs(rhs));
    }
    for (int m = n - 1; m <= std::min(M - 1, n + vm.d2 + 1); ++m) {
      Scalar lhs = Q.m(m, n);  // (Q^t)_{n,m}
      Scalar rhs = dv2p(n, m);
      if (m == n - 1) rhs -= Scalar(vm.spec.T * n) / (Scalar(vm.spec.N) * P.gamma[n - 1]);
      dev = std::max(dev, abs(lhs - rhs));
      scale = std::max(scale, abs(rhs));
    }
  }
  rep.max_dev = to_double(dev / scale);
  return rep;
}

// [P^t, Q] - (T/N) Id on the interior window
template <class Scalar>
ResidualReport heisenberg_residual(const BandOperator<Scalar>& Q,
                                   const BandOperator<Scalar>& P,
                                   const ValidatedModel& vm) {
  using std::abs;
  const int M = Q.size();
  Matrix<Scalar> C = P.m.transpose() * Q.m - Q.m * P.m.transpose();
  ResidualReport rep;
  rep.lo = vm.d1 + vm.d2;
  rep.hi = M - vm.d1 - vm.d2;
  const Scalar target(vm.spec.T / vm.spec.N);
  Scalar dev(0);
  for (int n = rep.lo; n < rep.hi; ++n)
    for (int m = rep.lo; m < rep.hi; ++m) {
      Scalar want = (n == m) ? target : Scalar(0);
      dev = std::max(dev, abs(C(n, m) - want));
    }
  rep.max_dev = to_double(dev / target);
  return rep;
}

// <tr M1^k> = tr(Pi_{N-1} Q^k), exact for N + kmax < valid rows
template <class Scalar>
std::vector<double> finite_moments(const BandOperator<Scalar>& Q, int N,
                                   int kmax) {
  const int M = Q.size();
  if (N + kmax + 1 > M)
    throw TruncationTooSmall("need M >= N + kmax + 1 for finite moments");
  std::vector<double> out(kmax + 1);
  Matrix<Scalar> pw = Matrix<Scalar>::Identity(M, M);
  for (int k = 0; k <= kmax; ++k) {
    Scalar tr(0);
    for (int j = 0; j < N; ++j) tr += pw(j, j);
    out[k] = to_double(tr);
    if (k < kmax) pw = (pw * Q.m).eval();
  }
  return out;
}

}  // namespace bimatrix
