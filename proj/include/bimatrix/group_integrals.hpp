// Unitary group integrals: Haar sampling, the HCIZ determinant formula with
// its Monte-Carlo cross-check, the Morozov two-resolvent generating function
// and the finite-N mixed-resolvent determinant.
#pragma once

#include <vector>

#include "bimatrix/band_ops.hpp"
#include "bimatrix/rng.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

struct DiagonalPair {
  VectorXd a, b;

  int size() const { return static_cast<int>(a.size()); }

  double vandermonde_a() const { return vdm(a); }
  double vandermonde_b() const { return vdm(b); }

  static double vdm(const VectorXd& v) {
    double p = 1.0;
    for (int i = 1; i < v.size(); ++i)
      for (int j = 0; j < i; ++j) p *= v[i] - v[j];
    return p;
  }
};

// Haar unitary from the QR of a complex Ginibre matrix with the phases of
// the R diagonal fixed
inline Eigen::MatrixXcd haar_sample(int N, Rng& rng) {
  Eigen::MatrixXcd g(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) g(i, j) = rng.complex_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < N; ++j) {
    Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

struct McEstimate {
  double mean = 0.0;
  double err = 0.0;  // standard error from batch means
};

namespace detail {

template <class F>
McEstimate batch_mc(long nsamples, int nbatch, const F& sample_value) {
  std::vector<double> batch(nbatch, 0.0);
  long per = nsamples / nbatch;
  for (int b = 0; b < nbatch; ++b) {
    double acc = 0.0;
    for (long i = 0; i < per; ++i) acc += sample_value();
    batch[b] = acc / per;
  }
  McEstimate est;
  for (double v : batch) est.mean += v;
  est.mean /= nbatch;
  double var = 0.0;
  for (double v : batch) var += (v - est.mean) * (v - est.mean);
  est.err = std::sqrt(var / (nbatch - 1) / nbatch);
  return est;
}

}  // namespace detail

struct HcizResult {
  double det_ratio = 0.0;   // det(e^{a_i b_j}) / (Delta(a) Delta(b))
  McEstimate mc;            // Haar average of e^{tr A U B U+}
  double ratio = 0.0;       // mc.mean / det_ratio: the empirical constant
  double ratio_err = 0.0;
};

inline HcizResult hciz_value(const DiagonalPair& pair, long nsamples,
                             std::uint64_t seed) {
  const int N = pair.size();
  double va = pair.vandermonde_a(), vb = pair.vandermonde_b();
  if (std::abs(va) < 1e-8 || std::abs(vb) < 1e-8)
    throw NearDegenerateSpectrum("Vandermonde below 1e-8");
  MatrixXd e(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) e(i, j) = std::exp(pair.a[i] * pair.b[j]);
  HcizResult out;
  out.det_ratio = e.determinant() / (va * vb);
  Rng rng(seed);
  out.mc = detail::batch_mc(nsamples, 100, [&]() {
    Eigen::MatrixXcd u = haar_sample(N, rng);
    double tr = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        tr += pair.a[i] * pair.b[j] * std::norm(u(i, j));
    return std::exp(tr);
  });
  out.ratio = out.mc.mean / out.det_ratio;
  out.ratio_err = out.mc.err / std::abs(out.det_ratio);
  return out;
}

struct MorozovResult {
  double formula = 0.0;
  McEstimate mc;  // self-normalized importance sampling over Haar
};

// 1 - det(1 - (x-A)^-1 E (y-B)^-1 E^-1) against the weighted Haar average
// of tr (x-A)^-1 U (y-B)^-1 U+ under weight e^{tr A U B U+}
inline MorozovResult morozov_generating(const DiagonalPair& pair, double x,
                                        double y, long nsamples,
                                        std::uint64_t seed) {
  const int N = pair.size();
  if (std::abs(pair.vandermonde_a()) < 1e-8 ||
      std::abs(pair.vandermonde_b()) < 1e-8)
    throw NearDegenerateSpectrum("Vandermonde below 1e-8");
  for (int i = 0; i < N; ++i)
    if (x == pair.a[i] || y == pair.b[i])
      throw SingularShift("x or y collides with a spectrum point");
  MatrixXd e(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) e(i, j) = std::exp(pair.a[i] * pair.b[j]);
  MatrixXd einv = e.inverse();
  MatrixXd m = MatrixXd::Identity(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double acc = 0.0;
      for (int k = 0; k < N; ++k)
        acc += e(i, k) / (y - pair.b[k]) * einv(k, j);
      m(i, j) -= acc / (x - pair.a[i]);
    }
  MorozovResult out;
  out.formula = 1.0 - m.determinant();

  // batch ratio estimator: E_w[f] = E[f w]/E[w]
  Rng rng(seed);
  const int nbatch = 100;
  std::vector<double> num(nbatch, 0.0), den(nbatch, 0.0);
  long per = nsamples / nbatch;
  for (int b = 0; b < nbatch; ++b) {
    for (long i = 0; i < per; ++i) {
      Eigen::MatrixXcd u = haar_sample(N, rng);
      double tr = 0.0, f = 0.0;
      for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
          double w2 = std::norm(u(r, c));
          tr += pair.a[r] * pair.b[c] * w2;
          f += w2 / ((x - pair.a[r]) * (y - pair.b[c]));
        }
      double w = std::exp(tr);
      num[b] += f * w;
      den[b] += w;
    }
  }
  double tot_num = 0.0, tot_den = 0.0;
  for (int b = 0; b < nbatch; ++b) { tot_num += num[b]; tot_den += den[b]; }
  out.mc.mean = tot_num / tot_den;
  // jackknife over batches for the ratio error
  double jmean = 0.0;
  std::vector<double> jk(nbatch);
  for (int b = 0; b < nbatch; ++b) {
    jk[b] = (tot_num - num[b]) / (tot_den - den[b]);
    jmean += jk[b];
  }
  jmean /= nbatch;
  double var = 0.0;
  for (int b = 0; b < nbatch; ++b) var += (jk[b] - jmean) * (jk[b] - jmean);
  out.mc.err = std::sqrt(var * (nbatch - 1) / nbatch);
  return out;
}

struct MixedResolventResult {
  double value = 0.0;        // at the larger truncation
  double certificate = 0.0;  // |value(M1) - value(M2)|
};

// 1 - det(Id_N - Pi_{N-1} (x-Q)^-1 (y-P^t)^-1 Pi_{N-1}) evaluated at two
// truncation sizes
template <class Scalar>
MixedResolventResult mixed_resolvent_finite(const BandOperator<Scalar>& Q,
                                            const BandOperator<Scalar>& P,
                                            const ValidatedModel& vm, int N,
                                            const Scalar& x, const Scalar& y,
                                            int m1, int m2, double tol = 1e-6) {
  using std::abs;
  if (m1 < N + 3 * (vm.d1 + vm.d2) || m2 > Q.valid_rows)
    throw TruncationTooSmall("mixed resolvent needs N + 3(d1+d2) <= M <= valid rows");
  auto eval = [&](int M) {
    Matrix<Scalar> xq = -Q.m.topLeftCorner(M, M);
    xq.diagonal().array() += x;
    Matrix<Scalar> yp = -P.m.topLeftCorner(M, M).transpose();
    yp.diagonal().array() += y;
    Eigen::PartialPivLU<Matrix<Scalar>> lux(xq), luy(yp);
    Matrix<Scalar> rhs = Matrix<Scalar>::Zero(M, N);
    for (int j = 0; j < N; ++j) rhs(j, j) = Scalar(1);
    Matrix<Scalar> t = lux.solve(luy.solve(rhs));
    Matrix<Scalar> m = Matrix<Scalar>::Identity(N, N) - t.topRows(N);
    return Scalar(1) - m.determinant();
  };
  Scalar v1 = eval(m1), v2 = eval(m2);
  MixedResolventResult out;
  out.value = to_double(v2);
  out.certificate = to_double(abs(v2 - v1));
  if (out.certificate > tol)
    throw TruncationNotConverged("mixed resolvent truncations differ by " +
                                 std::to_string(out.certificate));
  return out;
}

}  // namespace bimatrix
