// Folding of wave functions onto a window: psi_m(x) = sum_j (F_n)_{mj} psi_j
// for the window j in [n-d2, n], built from the one-sided inverses of (Q-x)
// applied to the Christoffel-Darboux matrix, F_n = (L - R) A_n.
#pragma once

#include "bimatrix/band_ops.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

namespace detail {

// commutator block of A_n = [Q, Pi_{n-1}]: rows [n-1, n+d-1], cols [n-d, n]
template <class Scalar>
Matrix<Scalar> cd_block(const BandOperator<Scalar>& Q, int n) {
  const int d = Q.sub;
  Matrix<Scalar> A = Matrix<Scalar>::Zero(d + 1, d + 1);
  for (int k = n - 1; k <= n + d - 1; ++k)
    for (int l = n - d; l <= n; ++l) {
      int ind = (l < n ? 1 : 0) - (k < n ? 1 : 0);
      if (ind != 0) A(k - (n - 1), l - (n - d)) = Q.m(k, l) * Scalar(ind);
    }
  return A;
}

// column k of the left inverse (Q-x)^-1_L; support on rows [0, k-d]
template <class Scalar>
Vector<Scalar> left_inverse_col(const BandOperator<Scalar>& Q, Scalar g_lead,
                                const Scalar& x, int k) {
  const int d = Q.sub;
  const int M = Q.size();
  Vector<Scalar> v = Vector<Scalar>::Zero(M);
  Scalar gp(1);
  for (int l = k - d; l <= k - 1; ++l) gp *= Q.gamma[l];
  v[k - d] = Scalar(1) / (g_lead * gp);
  for (int i = k - d - 1; i >= 0; --i) {
    Scalar gpi(1);
    for (int l = i; l <= i + d - 1; ++l) gpi *= Q.gamma[l];
    Scalar acc(0);
    for (int j = i + 1; j <= std::min(i + d + 1, k - d); ++j) {
      Scalar qmx = Q.m(i + d, j) - (i + d == j ? x : Scalar(0));
      acc -= qmx / (g_lead * gpi) * v[j];
    }
    v[i] = acc;
  }
  return v;
}

// column k of the right inverse (Q-x)^-1_R; support on rows [k+1, m_hi]
template <class Scalar>
Vector<Scalar> right_inverse_col(const BandOperator<Scalar>& Q, const Scalar& x,
                                 int k, int m_hi) {
  const int d = Q.sub;
  const int M = Q.size();
  Vector<Scalar> v = Vector<Scalar>::Zero(M);
  v[k + 1] = Scalar(1) / Q.gamma[k];
  for (int i = k + 2; i <= m_hi; ++i) {
    Scalar acc(0);
    for (int j = std::max(i - 1 - d, k + 1); j <= i - 1; ++j) {
      Scalar qmx = Q.m(i - 1, j) - (i - 1 == j ? x : Scalar(0));
      acc -= qmx / Q.gamma[i - 1] * v[j];
    }
    v[i] = acc;
  }
  return v;
}

}  // namespace detail

// rows m in [m_lo, m_hi] of F_n(x); columns are the window [n-d, n]
template <class Scalar>
Matrix<Scalar> folding_rows(const BandOperator<Scalar>& Q, Scalar g_lead,
                            int n, const Scalar& x, int m_lo, int m_hi) {
  const int d = Q.sub;
  if (m_lo < 0 || n - d - 1 < 0 || m_hi + 2 > Q.valid_rows || n + d > Q.size())
    throw TruncationTooSmall("folding window outside the reliable truncation");
  Matrix<Scalar> A = detail::cd_block(Q, n);
  Matrix<Scalar> F = Matrix<Scalar>::Zero(m_hi - m_lo + 1, d + 1);
  for (int k = n - 1; k <= n + d - 1; ++k) {
    Vector<Scalar> colL = detail::left_inverse_col(Q, g_lead, x, k);
    Vector<Scalar> colR = detail::right_inverse_col(Q, x, k, m_hi);
    for (int m = m_lo; m <= m_hi; ++m) {
      Scalar c = colL[m] - colR[m];
      if (c == Scalar(0)) continue;
      for (int j = 0; j <= d; ++j)
        F(m - m_lo, j) += c * A(k - (n - 1), j);
    }
  }
  return F;
}

// same rows computed by running the three-term recurrence up and down from
// the window; used as an independent check of the matrix formula
template <class Scalar>
Matrix<Scalar> folding_rows_recurrence(const BandOperator<Scalar>& Q,
                                       int n, const Scalar& x, int m_lo,
                                       int m_hi) {
  const int d = Q.sub;
  if (m_lo < 0 || m_hi + 2 > Q.valid_rows)
    throw TruncationTooSmall("recurrence window outside the truncation");
  // rows for every m in [min(m_lo, n-d), max(m_hi, n)]
  int lo = std::min(m_lo, n - d), hi = std::max(m_hi, n);
  Matrix<Scalar> rows = Matrix<Scalar>::Zero(hi - lo + 1, d + 1);
  auto row = [&](int m) { return rows.row(m - lo); };
  for (int j = n - d; j <= n; ++j)
    if (j >= lo && j <= hi) rows(j - lo, j - (n - d)) = Scalar(1);
  // upward: gamma_m psi_{m+1} = (x - Q_mm) psi_m - sum_{k>=1} Q_{m,m-k} psi_{m-k}
  for (int m = n; m + 1 <= hi; ++m) {
    Vector<Scalar> acc = ((x - Q.m(m, m)) * row(m)).transpose();
    for (int k = 1; k <= d; ++k)
      if (m - k >= lo) acc -= Q.m(m, m - k) * row(m - k).transpose();
    rows.row(m + 1 - lo) = acc.transpose() / Q.gamma[m];
  }
  // downward: Q_{m,m-d} psi_{m-d} = x psi_m - gamma_m psi_{m+1}
  //            - sum_{k=0}^{d-1} Q_{m,m-k} psi_{m-k}
  for (int m = n - 1; m - d >= lo; --m) {
    Vector<Scalar> acc = (x * row(m) - Q.gamma[m] * row(m + 1)).transpose();
    for (int k = 0; k <= d - 1; ++k) acc -= Q.m(m, m - k) * row(m - k).transpose();
    rows.row(m - d - lo) = acc.transpose() / Q.m(m, m - d);
  }
  return rows.block(m_lo - lo, 0, m_hi - m_lo + 1, d + 1);
}

// dual-window folding: phi~_m(x) = sum_j (F~_n)_{mj} phi~_j(x) over the dual
// window j in [n-1, n+d-1]; F~_n = (L~ - R~) A_n^t
template <class Scalar>
Matrix<Scalar> folding_rows_dual(const BandOperator<Scalar>& Q, Scalar g_lead,
                                 int n, const Scalar& x, int m_lo, int m_hi) {
  const int d = Q.sub;
  const int M = Q.size();
  if (m_lo < 0 || n - d - 1 < 0 || m_hi + d + 2 > Q.valid_rows)
    throw TruncationTooSmall("dual folding window outside the truncation");
  Matrix<Scalar> A = detail::cd_block(Q, n);
  Matrix<Scalar> F = Matrix<Scalar>::Zero(m_hi - m_lo + 1, d + 1);
  for (int k = n - d; k <= n; ++k) {
    // L~ column k: support rows >= k + d
    Vector<Scalar> colL = Vector<Scalar>::Zero(M);
    {
      Scalar gp(1);
      for (int l = k; l <= k + d - 1; ++l) gp *= Q.gamma[l];
      colL[k + d] = Scalar(1) / (g_lead * gp);
      for (int i = k + d + 1; i <= m_hi; ++i) {
        Scalar gpi(1);
        for (int l = i - d; l <= i - 1; ++l) gpi *= Q.gamma[l];
        Scalar acc(0);
        for (int j = std::max(i - d - 1, k + d); j <= i - 1; ++j) {
          Scalar qmx = Q.m(j, i - d) - (j == i - d ? x : Scalar(0));
          acc -= qmx / (g_lead * gpi) * colL[j];
        }
        colL[i] = acc;
      }
    }
    // R~ column k: support rows <= k - 1
    Vector<Scalar> colR = Vector<Scalar>::Zero(M);
    if (k >= 1) {
      colR[k - 1] = Scalar(1) / Q.gamma[k - 1];
      for (int i = k - 2; i >= 0; --i) {
        Scalar acc(0);
        for (int j = i + 1; j <= std::min(i + d + 1, k - 1); ++j) {
          Scalar qmx = Q.m(j, i + 1) - (j == i + 1 ? x : Scalar(0));
          acc -= qmx / Q.gamma[i] * colR[j];
        }
        colR[i] = acc;
      }
    }
    for (int m = m_lo; m <= m_hi; ++m) {
      Scalar c = colL[m] - colR[m];
      if (c == Scalar(0)) continue;
      for (int j = 0; j <= d; ++j)
        F(m - m_lo, j) += c * A(j, k - (n - d));
    }
  }
  return F;
}

}  // namespace bimatrix
