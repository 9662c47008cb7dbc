// Finite-n differential systems D_1, D~_1 (and the y-side pair via role
// swap), spectral duality and the finite-n spectral curve E_n(x,y).
#pragma once

#include <string>
#include <vector>

#include "bimatrix/folding.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

// matrix-valued polynomial in x: sum_k coeff[k] x^k
template <class Scalar>
struct DifferentialSystem {
  int n = 0;
  bool tilde = false;
  std::vector<Matrix<Scalar>> coeff;

  int size() const { return coeff.empty() ? 0 : static_cast<int>(coeff[0].rows()); }
  int degree() const { return static_cast<int>(coeff.size()) - 1; }

  Matrix<Scalar> eval(const Scalar& x) const {
    Matrix<Scalar> acc = coeff.back();
    for (int k = degree() - 1; k >= 0; --k) acc = (acc * x + coeff[k]).eval();
    return acc;
  }
};

namespace detail {

// Chebyshev sample points on [-r, r]
template <class Scalar>
std::vector<Scalar> cheb_nodes(int m, double r) {
  std::vector<Scalar> x(m);
  for (int j = 0; j < m; ++j)
    x[j] = Scalar(r * std::cos(M_PI * (j + 0.5) / m));
  return x;
}

// least-squares fit of matrix samples to a degree-deg matrix polynomial
template <class Scalar>
std::vector<Matrix<Scalar>> fit_matrix_poly(const std::vector<Scalar>& xs,
                                            const std::vector<Matrix<Scalar>>& vals,
                                            int deg) {
  const int m = static_cast<int>(xs.size());
  const int q = static_cast<int>(vals[0].rows());
  Matrix<Scalar> V(m, deg + 1);
  for (int i = 0; i < m; ++i) {
    Scalar p(1);
    for (int k = 0; k <= deg; ++k) { V(i, k) = p; p *= xs[i]; }
  }
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(V);
  std::vector<Matrix<Scalar>> coeff(deg + 1, Matrix<Scalar>::Zero(q, q));
  Vector<Scalar> rhs(m), sol(deg + 1);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      for (int i = 0; i < m; ++i) rhs[i] = vals[i](a, b);
      sol = qr.solve(rhs);
      for (int k = 0; k <= deg; ++k) coeff[k](a, b) = sol[k];
    }
  return coeff;
}

// (dV(Q) - dV(x)) / (Q - x) = sum_{k>=2} g_k sum_{a+b=k-2} Q^a x^b
template <class Scalar>
Matrix<Scalar> divided_difference_dv(const Potential& v,
                                     const Matrix<Scalar>& Q, const Scalar& x) {
  const int M = static_cast<int>(Q.rows());
  Matrix<Scalar> acc = Matrix<Scalar>::Zero(M, M);
  // Horner in Q: acc = sum over a of Q^a * c_a(x) with
  // c_a(x) = sum_{k >= a+2} g_k x^{k-2-a}
  for (int a = v.deg() - 2; a >= 0; --a) {
    Scalar c(0);
    Scalar xp(1);
    for (int k = a + 2; k <= v.deg(); ++k) { c += Scalar(v.g[k]) * xp; xp *= x; }
    acc = (Q * acc).eval();
    acc.diagonal().array() += c;
  }
  return acc;
}

}  // namespace detail

// construction of D_{1,n} as the folded operator (Pi_n - Pi_{n-d2-1}) P^t F_n(x)
template <class Scalar>
Matrix<Scalar> d1_from_folding(const BandOperator<Scalar>& Q,
                               const BandOperator<Scalar>& P, Scalar g_lead,
                               int n, const Scalar& x) {
  const int d_dual = Q.sub;  // d2
  const int d_own = P.sub;   // d1
  Matrix<Scalar> F = folding_rows(Q, g_lead, n, x, n - d_dual - 1, n + d_own);
  Matrix<Scalar> D = Matrix<Scalar>::Zero(d_dual + 1, d_dual + 1);
  for (int m = n - d_dual; m <= n; ++m)
    for (int j = 0; j <= d_dual; ++j) {
      Scalar acc(0);
      for (int k = std::max(0, m - 1); k <= m + d_own; ++k)
        acc += P.m(k, m) * F(k - (n - d_dual - 1), j);
      D(m - (n - d_dual), j) = acc;
    }
  return D;
}

// explicit three-term construction of D_{1,n}
template <class Scalar>
Matrix<Scalar> d1_explicit(const BandOperator<Scalar>& Q,
                           const BandOperator<Scalar>& P,
                           const Potential& v_own, int n, const Scalar& x) {
  const int d = Q.sub;  // d2
  const int lo = n - d;
  Matrix<Scalar> dvq = poly_of_operator(v_own, Q.m);
  Matrix<Scalar> D = Matrix<Scalar>::Zero(d + 1, d + 1);
  // upper-triangular dV(Q) block and the dV(x) corner
  for (int r = lo; r <= n - 1; ++r)
    for (int c = r; c <= n - 1; ++c) D(r - lo, c - lo) = dvq(r, c);
  D(d, d) = v_own.dvalue(x);
  // window-shift companion scaled by the gammas
  Scalar alpha_d = Q.m(n - 1, n - 1 - d);
  for (int c = lo; c <= n; ++c) {
    Scalar entry;
    if (c == n) entry = -Q.gamma[n - 1] / alpha_d;
    else if (c == n - 1) entry = (x - Q.m(n - 1, n - 1)) / alpha_d;
    else entry = -Q.m(n - 1, c) / alpha_d;
    D(0, c - lo) += Q.gamma[n - d - 1] * entry;
  }
  for (int r = 1; r <= d; ++r) D(r, r - 1) += Q.gamma[n - d - 1 + r];
  // divided-difference block against the CD matrix
  Matrix<Scalar> W = detail::divided_difference_dv(v_own, Q.m, x);
  Matrix<Scalar> A = detail::cd_block(Q, n);
  for (int r = 0; r <= d; ++r)
    for (int c = 0; c <= d; ++c) {
      Scalar acc(0);
      for (int k = 0; k <= d; ++k) acc += W(lo + r, n - 1 + k) * A(k, c);
      D(r, c) -= acc;
    }
  return D;
}

// D~_{1,n}(x) = (Pi_{n+d2-1} - Pi_{n-2}) P F~_n(x)
template <class Scalar>
Matrix<Scalar> d1_tilde(const BandOperator<Scalar>& Q,
                        const BandOperator<Scalar>& P, Scalar g_lead, int n,
                        const Scalar& x) {
  const int d_dual = Q.sub;
  const int d_own = P.sub;
  Matrix<Scalar> F = folding_rows_dual(Q, g_lead, n, x, n - 1 - d_own, n + d_dual);
  Matrix<Scalar> D = Matrix<Scalar>::Zero(d_dual + 1, d_dual + 1);
  for (int m = n - 1; m <= n + d_dual - 1; ++m)
    for (int j = 0; j <= d_dual; ++j) {
      Scalar acc(0);
      for (int k = std::max(0, m - d_own); k <= m + 1; ++k)
        acc += P.m(m, k) * F(k - (n - 1 - d_own), j);
      D(m - (n - 1), j) = acc;
    }
  return D;
}

struct BuildReport {
  double constructions_disagreement = 0.0;
  double interpolation_residual = 0.0;
};

// Builds D_{1,n} both ways (folding vs explicit), interpolates the entries
// in x and reports the spread.  For the y-side systems call with the roles
// of (Q, P) and the potentials swapped.
template <class Scalar>
DifferentialSystem<Scalar> build_D1(const BandOperator<Scalar>& Q,
                                    const BandOperator<Scalar>& P,
                                    const Potential& v_own,
                                    const Potential& v_dual, int n,
                                    BuildReport* report = nullptr,
                                    double tol = 1e-6) {
  using std::abs;
  const int d_own = P.sub, d_dual = Q.sub;
  if (n <= std::max(d_own, d_dual) + 1)
    throw TruncationTooSmall("window index too small for the differential system");
  const Scalar g_lead(v_dual.leading());
  std::vector<Scalar> xs = detail::cheb_nodes<Scalar>(d_own + 2, 2.0);
  std::vector<Matrix<Scalar>> va, vb;
  for (const Scalar& x : xs) {
    va.push_back(d1_from_folding(Q, P, g_lead, n, x));
    vb.push_back(d1_explicit(Q, P, v_own, n, x));
  }
  Scalar dev(0), scale(0);
  for (size_t i = 0; i < xs.size(); ++i) {
    dev = std::max(dev, (va[i] - vb[i]).cwiseAbs().maxCoeff());
    scale = std::max(scale, va[i].cwiseAbs().maxCoeff());
  }
  double disagreement = to_double(dev / scale);
  if (report) report->constructions_disagreement = disagreement;
  if (disagreement > tol)
    throw ConstructionsDisagree("folding vs explicit: " + std::to_string(disagreement));

  DifferentialSystem<Scalar> sys;
  sys.n = n;
  sys.tilde = false;
  sys.coeff = detail::fit_matrix_poly(xs, va, d_own);
  // held-out polynomiality check
  Scalar xh(0.31);
  Matrix<Scalar> direct = d1_from_folding(Q, P, g_lead, n, xh);
  double resid = to_double((sys.eval(xh) - direct).cwiseAbs().maxCoeff() /
                           std::max(Scalar(1), direct.cwiseAbs().maxCoeff()));
  if (report) report->interpolation_residual = resid;
  if (resid > 1e-8)
    throw InterpolationInconsistent("entries are not degree-" +
                                    std::to_string(d_own) + " polynomials");
  return sys;
}

template <class Scalar>
DifferentialSystem<Scalar> build_D1_tilde(const BandOperator<Scalar>& Q,
                                          const BandOperator<Scalar>& P,
                                          const Potential& v_dual, int n) {
  const int d_own = P.sub;
  const Scalar g_lead(v_dual.leading());
  std::vector<Scalar> xs = detail::cheb_nodes<Scalar>(d_own + 2, 2.0);
  std::vector<Matrix<Scalar>> vals;
  for (const Scalar& x : xs) vals.push_back(d1_tilde(Q, P, g_lead, n, x));
  DifferentialSystem<Scalar> sys;
  sys.n = n;
  sys.tilde = true;
  sys.coeff = detail::fit_matrix_poly(xs, vals, d_own);
  Scalar xh(0.47);
  Matrix<Scalar> direct = d1_tilde(Q, P, g_lead, n, xh);
  double resid = to_double((sys.eval(xh) - direct).cwiseAbs().maxCoeff() /
                           std::max(Scalar(1), direct.cwiseAbs().maxCoeff()));
  if (resid > 1e-8)
    throw InterpolationInconsistent("dual system entries not polynomial");
  return sys;
}

// max_x |A_n D_1(x) - D~_1(x)^t A_n| relative to the matrix scale
template <class Scalar>
double duality_residual(const DifferentialSystem<Scalar>& D1,
                        const DifferentialSystem<Scalar>& D1t,
                        const Matrix<Scalar>& Ablock) {
  using std::abs;
  Scalar dev(0), scale(1);
  for (double xv : {0.0, -1.7, -1.1, -0.6, -0.2, 0.3, 0.8, 1.3, 1.9, 2.4}) {
    Scalar x(xv);
    Matrix<Scalar> lhs = Ablock * D1.eval(x);
    Matrix<Scalar> rhs = D1t.eval(x).transpose() * Ablock;
    dev = std::max(dev, (lhs - rhs).cwiseAbs().maxCoeff());
    scale = std::max(scale, lhs.cwiseAbs().maxCoeff());
  }
  return to_double(dev / scale);
}

// bivariate spectral curve table E(x,y) = lead * det(y - D(x)); degrees
// (d_own + 1, d_dual + 1) with the held-out consistency check
template <class Scalar>
struct SpectralCurvePoly {
  Matrix<Scalar> E;  // E(i, j) multiplies x^i y^j
  int deg_x() const { return static_cast<int>(E.rows()) - 1; }
  int deg_y() const { return static_cast<int>(E.cols()) - 1; }
  Scalar eval(const Scalar& x, const Scalar& y) const {
    Scalar acc(0), xp(1);
    for (int i = 0; i <= deg_x(); ++i) {
      Scalar yp(1), row(0);
      for (int j = 0; j <= deg_y(); ++j) { row += E(i, j) * yp; yp *= y; }
      acc += xp * row;
      xp *= x;
    }
    return acc;
  }
};

template <class Scalar>
SpectralCurvePoly<Scalar> spectral_curve_finite_n(
    const DifferentialSystem<Scalar>& D, Scalar lead, int d_own, int d_dual) {
  using std::abs;
  const int nx = d_own + 3, ny = d_dual + 3;
  std::vector<Scalar> xs = detail::cheb_nodes<Scalar>(nx, 2.0);
  std::vector<Scalar> ys = detail::cheb_nodes<Scalar>(ny, 2.0);
  // values
  Matrix<Scalar> V(nx, ny);
  for (int i = 0; i < nx; ++i) {
    Matrix<Scalar> Dx = D.eval(xs[i]);
    for (int j = 0; j < ny; ++j) {
      Matrix<Scalar> m = -Dx;
      m.diagonal().array() += ys[j];
      V(i, j) = lead * m.determinant();
    }
  }
  // tensor least squares: first fit in y per x-node, then fit rows in x
  Matrix<Scalar> Vy(ny, d_dual + 2);
  for (int j = 0; j < ny; ++j) {
    Scalar p(1);
    for (int k = 0; k <= d_dual + 1; ++k) { Vy(j, k) = p; p *= ys[j]; }
  }
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qy(Vy);
  Matrix<Scalar> cy(nx, d_dual + 2);
  for (int i = 0; i < nx; ++i)
    cy.row(i) = qy.solve(V.row(i).transpose()).transpose();
  Matrix<Scalar> Vx(nx, d_own + 2);
  for (int i = 0; i < nx; ++i) {
    Scalar p(1);
    for (int k = 0; k <= d_own + 1; ++k) { Vx(i, k) = p; p *= xs[i]; }
  }
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qx(Vx);
  SpectralCurvePoly<Scalar> out;
  out.E = Matrix<Scalar>::Zero(d_own + 2, d_dual + 2);
  for (int j = 0; j <= d_dual + 1; ++j)
    out.E.col(j) = qx.solve(cy.col(j));
  // held-out check
  Scalar xh(0.39), yh(-0.83);
  Matrix<Scalar> m = -D.eval(xh);
  m.diagonal().array() += yh;
  Scalar direct = lead * m.determinant();
  Scalar scale = out.E.cwiseAbs().maxCoeff();
  if (to_double(abs(out.eval(xh, yh) - direct) / scale) > 1e-6)
    throw InterpolationInconsistent("E_n(x,y) interpolation failed held-out check");
  return out;
}

}  // namespace bimatrix
