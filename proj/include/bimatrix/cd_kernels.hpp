// Christoffel-Darboux matrices, determinantal kernels and correlation
// densities.  Kernels use weight-dressed wave functions; K21 then carries
// the exp(s x y) subtraction (the finite form of the tail sum).
#pragma once

#include <map>
#include <vector>

#include "bimatrix/band_ops.hpp"
#include "bimatrix/biortho.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

template <class Scalar>
struct CDMatrix {
  int n = 0;
  int row_lo = 0, col_lo = 0;  // block spans rows [n-1, n+d-1], cols [n-d, n]
  MatrixXd block;              // (d+1) x (d+1)
  double pad_residual = 0.0;   // mass outside the block, relative
};

// A_n = [Q, Pi_{n-1}] (pass Q); B_n likewise from P.
template <class Scalar>
CDMatrix<Scalar> cd_matrices(const BandOperator<Scalar>& op,
                             const ValidatedModel& vm, int n) {
  using std::abs;
  const int M = op.size();
  const int d = op.sub;
  if (!(vm.d1 + vm.d2 < n && n < M - vm.d1 - vm.d2))
    throw TruncationTooSmall("window index outside the reliable interior");
  // [op, Pi_{n-1}]_{kl} = op_{kl} (1_{l<n} - 1_{k<n})
  CDMatrix<Scalar> out;
  out.n = n;
  out.row_lo = n - 1;
  out.col_lo = n - d;
  out.block = MatrixXd::Zero(d + 1, d + 1);
  Scalar pad(0), scale(0);
  for (int k = 0; k < op.valid_rows; ++k)
    for (int l = 0; l < M; ++l) {
      int ind = (l < n ? 1 : 0) - (k < n ? 1 : 0);
      if (ind == 0) continue;
      Scalar v = op.m(k, l) * Scalar(ind);
      if (abs(v) > scale) scale = abs(v);
      bool in_block = (k >= n - 1 && k <= n + d - 1 && l >= n - d && l <= n);
      if (in_block)
        out.block(k - out.row_lo, l - out.col_lo) = to_double(v);
      else if (abs(v) > pad)
        pad = abs(v);
    }
  out.pad_residual = to_double(pad / scale);
  return out;
}

// Evaluates the four kernels truncated to the first `nstates` wave functions.
template <class Scalar>
class KernelContext {
 public:
  KernelContext(const BiorthogonalFamily<Scalar>& fam, const ValidatedModel& vm,
                int nstates)
      : fam_(&fam), vm_(&vm), n_(nstates) {}

  double psi(int j, double x) const {
    WaveEvaluator<Scalar> w{fam_, vm_};
    return w.psi(j, x);
  }
  double phi(int j, double y) const {
    WaveEvaluator<Scalar> w{fam_, vm_};
    return w.phi(j, y);
  }
  double psi_tilde(int j, double y) const { return cached(true, j, y); }
  double phi_tilde(int j, double x) const { return cached(false, j, x); }

  double K12(double x, double y) const {
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) acc += psi(j, x) * phi(j, y);
    return acc;
  }
  double K11(double x, double xp) const {
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) acc += psi(j, x) * phi_tilde(j, xp);
    return acc;
  }
  double K22(double yp, double y) const {
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) acc += psi_tilde(j, yp) * phi(j, y);
    return acc;
  }
  double K21(double yp, double xp) const {
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) acc += psi_tilde(j, yp) * phi_tilde(j, xp);
    return acc - std::exp(vm_->s() * xp * yp);
  }

  int nstates() const { return n_; }
  const ValidatedModel& model() const { return *vm_; }

 private:
  double cached(bool x_side_transform, int j, double t) const {
    auto key = std::make_tuple(x_side_transform, j, t);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double v = fourier_wave(*fam_, *vm_, j, t, x_side_transform);
    cache_.emplace(key, v);
    return v;
  }

  const BiorthogonalFamily<Scalar>* fam_;
  const ValidatedModel* vm_;
  int n_;
  mutable std::map<std::tuple<bool, int, double>, double> cache_;
};

// rho_{r;s} normalized so each marginal integrates to one:
// rho = det(blocks) (N-r)! (N-s)! / (N!)^2.
template <class Scalar>
double correlation_density(const KernelContext<Scalar>& K,
                           const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const int r = static_cast<int>(xs.size());
  const int s = static_cast<int>(ys.size());
  if (r > 2 || s > 2) throw UnsupportedOrder("correlation order r,s <= 2");
  if (r + s < 1) throw UnsupportedOrder("need at least one point");
  const int N = K.nstates();
  MatrixXd m(r + s, r + s);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m(i, j) = K.K11(xs[i], xs[j]);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < s; ++j) m(i, r + j) = K.K12(xs[i], ys[j]);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < r; ++j) m(r + i, j) = K.K21(ys[i], xs[j]);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) m(r + i, r + j) = K.K22(ys[i], ys[j]);
  double det = (r + s) == 1 ? m(0, 0) : m.determinant();
  auto falling = [N](int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= N - i;
    return p;
  };
  return det / (falling(r) * falling(s));
}

// one-point density rho_{1;0}(x) = K11(x, x)/N
template <class Scalar>
double kernel_density(const KernelContext<Scalar>& K, double x) {
  return K.K11(x, x) / K.nstates();
}

// max over the grid of |(x'-x) K11_n(x,x') - sum A_n psi phi~|, relative to
// the kernel scale
template <class Scalar>
double cd_identity_residual(const BiorthogonalFamily<Scalar>& fam,
                            const ValidatedModel& vm,
                            const BandOperator<Scalar>& Q, int n,
                            const std::vector<double>& xg,
                            const std::vector<double>& xpg) {
  const int d2 = vm.d2;
  CDMatrix<Scalar> A = cd_matrices(Q, vm, n);
  KernelContext<Scalar> K(fam, vm, n);
  double dev = 0.0, scale = 0.0;
  for (double x : xg) {
    for (double xp : xpg) {
      double lhs = (xp - x) * K.K11(x, xp);
      double rhs = 0.0;
      for (int i = n - 1; i <= n + d2 - 1; ++i)
        for (int j = n - d2; j <= n; ++j)
          rhs += A.block(i - A.row_lo, j - A.col_lo) * K.psi(j, x) *
                 K.phi_tilde(i, xp);
      scale = std::max(scale, std::abs(lhs));
      dev = std::max(dev, std::abs(lhs - rhs));
    }
  }
  return dev / scale;
}

}  // namespace bimatrix
