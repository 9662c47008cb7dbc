// Biorthogonal families pi_n, sigma_n with <pi_n, sigma_m> = h_n delta_nm,
// built from an LDU factorization of the bimoment matrix, plus wave
// functions and their Fourier-Laplace transforms.
#pragma once

#include <utility>
#include <vector>

#include "bimatrix/bimoments.hpp"
#include "bimatrix/oracles.hpp"
#include "bimatrix/potential.hpp"
#include "bimatrix/quadrature.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

template <class Scalar>
struct BiorthogonalFamily {
  // row n holds the monomial coefficients of the monic polynomial, cols 0..n
  Matrix<Scalar> pi, sigma;
  Vector<Scalar> h;
  int max_degree;         // rows cover n = 0..max_degree
  Scalar ortho_residual;  // max |<pi_n,sigma_m> - h_n d_nm| / h_n vs bimoments

  template <class T>
  T eval_pi(int n, const T& x) const {
    T acc(0);
    for (int c = n; c >= 0; --c) acc = acc * x + T(to_double(pi(n, c)));
    return acc;
  }
  template <class T>
  T eval_sigma(int n, const T& y) const {
    T acc(0);
    for (int c = n; c >= 0; --c) acc = acc * y + T(to_double(sigma(n, c)));
    return acc;
  }
  // same-precision evaluation
  Scalar eval_pi_s(int n, const Scalar& x) const {
    Scalar acc(0);
    for (int c = n; c >= 0; --c) acc = acc * x + pi(n, c);
    return acc;
  }
  Scalar eval_sigma_s(int n, const Scalar& y) const {
    Scalar acc(0);
    for (int c = n; c >= 0; --c) acc = acc * y + sigma(n, c);
    return acc;
  }
};

// Doolittle LDU with no pivoting: I = L D U, pi = rows of L^-1,
// sigma = rows of (U^T)^-1, h_n = D_nn = D_{n+1}/D_n.
template <class Scalar>
BiorthogonalFamily<Scalar> orthogonalize(const BimomentMatrix<Scalar>& bm) {
  using std::abs;
  const Matrix<Scalar>& I = bm.I;
  const int M = static_cast<int>(I.rows());
  Matrix<Scalar> L = Matrix<Scalar>::Identity(M, M);
  Matrix<Scalar> U = Matrix<Scalar>::Identity(M, M);
  Vector<Scalar> d(M);
  Matrix<Scalar> A = I;
  Scalar scale = I.cwiseAbs().maxCoeff();
  for (int k = 0; k < M; ++k) {
    d[k] = A(k, k);
    if (abs(d[k]) <= scale * Scalar(1e-60))
      throw SingularMinor("vanishing leading principal minor at degree " + std::to_string(k));
    for (int j = k + 1; j < M; ++j) U(k, j) = A(k, j) / d[k];
    for (int i = k + 1; i < M; ++i) L(i, k) = A(i, k) / d[k];
    for (int i = k + 1; i < M; ++i)
      for (int j = k + 1; j < M; ++j) A(i, j) -= L(i, k) * d[k] * U(k, j);
  }

  BiorthogonalFamily<Scalar> fam;
  fam.max_degree = M - 1;
  fam.h = d;
  // pi = L^-1 (unit lower), sigma^T = U^-1 (unit upper); forward substitution
  fam.pi = Matrix<Scalar>::Zero(M, M);
  fam.sigma = Matrix<Scalar>::Zero(M, M);
  for (int n = 0; n < M; ++n) {
    fam.pi(n, n) = Scalar(1);
    for (int c = n - 1; c >= 0; --c) {
      Scalar acc(0);
      for (int k = c; k < n; ++k) acc += L(n, k) * fam.pi(k, c);
      fam.pi(n, c) = -acc;
    }
    fam.sigma(n, n) = Scalar(1);
    for (int c = n - 1; c >= 0; --c) {
      Scalar acc(0);
      for (int k = c; k < n; ++k) acc += U(k, n) * fam.sigma(k, c);
      fam.sigma(n, c) = -acc;
    }
  }
  // residual of the pairing against the bimoments
  Matrix<Scalar> G = fam.pi * I * fam.sigma.transpose();
  Scalar resid(0);
  for (int n = 0; n < M; ++n)
    for (int m = 0; m < M; ++m) {
      Scalar target = (n == m) ? d[n] : Scalar(0);
      Scalar dev = abs(G(n, m) - target) / abs(d[n]);
      if (dev > resid) resid = dev;
    }
  fam.ortho_residual = resid;
  return fam;
}

// psi_n(x) = pi_n(x) exp(-(N/T) V1(x)) / sqrt(h_n); phi_n analogous.
template <class Scalar>
struct WaveEvaluator {
  const BiorthogonalFamily<Scalar>* fam;
  const ValidatedModel* vm;

  double psi(int n, double x) const {
    using std::exp;
    using std::sqrt;
    Scalar v = fam->eval_pi_s(n, Scalar(x)) *
               exp(-Scalar(vm->s()) * vm->spec.v1.value(Scalar(x))) /
               sqrt(fam->h[n]);
    return to_double(v);
  }
  double phi(int n, double y) const {
    using std::exp;
    using std::sqrt;
    Scalar v = fam->eval_sigma_s(n, Scalar(y)) *
               exp(-Scalar(vm->s()) * vm->spec.v2.value(Scalar(y))) /
               sqrt(fam->h[n]);
    return to_double(v);
  }
};

namespace detail {

// integration window for int p(x) exp(-s(V(x) - x t)) dx centered on the
// maximum of the exponent
inline std::pair<double, double> transform_window(const Potential& v, double s,
                                                  double t, int n) {
  double xc = v.argmin_coupled(t);
  double f0 = v.value(xc) - xc * t;
  double need = (100.0 + 3.0 * n) / s;
  double lo = xc, hi = xc;
  double step = 0.25;
  while (v.value(hi) - hi * t - f0 < need && hi - xc < 1e3) hi += step;
  while (v.value(lo) - lo * t - f0 < need && xc - lo < 1e3) lo -= step;
  return {lo, hi};
}

}  // namespace detail

// Heine check: compares pi_n from the triangular factorization against the
// matrix-integral average <det(x - M1)> at 5 sample points (n <= 2).
template <class Scalar>
double heine_check(const BiorthogonalFamily<Scalar>& fam,
                   const ValidatedModel& vm, int n) {
  if (n > 2) throw OracleTooLarge("Heine oracle limited to n <= 2");
  double dev = 0.0;
  for (double x : {-1.5, -0.5, 0.3, 1.0, 2.0}) {
    double oracle = heine_pi_oracle(vm, n, x);
    double ours = to_double(fam.template eval_pi<double>(n, x));
    double scale = std::max({1.0, std::abs(oracle), std::abs(ours)});
    dev = std::max(dev, std::abs(oracle - ours) / scale);
  }
  return dev;
}

// Fourier-Laplace transform of a wave function over the real contour:
// side x: psi~_n(y) = int psi_n(x) exp(s x y) dx,
// side y: phi~_n(x) = int phi_n(y) exp(s x y) dy.
template <class Scalar>
double fourier_wave(const BiorthogonalFamily<Scalar>& fam,
                    const ValidatedModel& vm, int n, double t,
                    bool x_side = true, double reltol = 1e-10) {
  using std::exp;
  using std::sqrt;
  const Potential& v = x_side ? vm.spec.v1 : vm.spec.v2;
  const double s = vm.s();
  auto [lo, hi] = detail::transform_window(v, s, t, n);
  double hn = to_double(fam.h[n]);
  // coefficients in double; the monic polynomial is well scaled on the window
  std::vector<double> coeff(n + 1);
  for (int c = 0; c <= n; ++c)
    coeff[c] = to_double(x_side ? fam.pi(n, c) : fam.sigma(n, c));
  auto f = [&](double u) {
    double p = 0.0;
    for (int c = n; c >= 0; --c) p = p * u + coeff[c];
    return p * std::exp(-s * (v.value(u) - u * t));
  };
  auto fabsf = [&](double u) { return std::abs(f(u)); };
  // converge against the L1 mass so that parity zeros are representable
  double val = 0.0, prev = integrate<double>(f, lo, hi, 64);
  bool ok = false;
  for (int order = 128; order <= 8192; order *= 2) {
    val = integrate<double>(f, lo, hi, order);
    double scale = std::max(std::abs(val), integrate<double>(fabsf, lo, hi, order));
    if (std::abs(val - prev) <= reltol * std::max(scale, 1e-300)) { ok = true; break; }
    prev = val;
  }
  if (!ok) throw QuadratureNotConverged("wave transform did not stabilize");
  return val / std::sqrt(hn);
}

}  // namespace bimatrix
