// Metropolis sampler over ordered eigenvalue configurations of the coupled
// measure Delta(x) Delta(y) det(e^{s x_i y_j}) prod e^{-s(V1 + V2)}.
#pragma once

#include <vector>

#include "bimatrix/potential.hpp"
#include "bimatrix/rng.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

struct SamplerDiagnostics {
  double acceptance = 0.0;
  double step = 0.0;
  int recorded = 0;
  int burn_sweeps = 0;
  int thin_sweeps = 0;
};

struct SamplerResult {
  MatrixXd xs, ys;  // one configuration per row, coordinates ascending
  SamplerDiagnostics diag;
};

namespace detail {

// log det(e^{s x_i y_j}) with centered exponents to keep the LU in range
inline double log_coupling_det(const VectorXd& x, const VectorXd& y, double s) {
  const int n = static_cast<int>(x.size());
  if (n == 1) return s * x[0] * y[0];
  double xb = x.mean(), yb = y.mean();
  MatrixXd e(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      e(i, j) = std::exp(s * (x[i] - xb) * (y[j] - yb));
  Eigen::PartialPivLU<MatrixXd> lu(e);
  double logdet = 0.0;
  double sign = lu.permutationP().determinant();
  for (int i = 0; i < n; ++i) {
    double u = lu.matrixLU()(i, i);
    if (u < 0) { sign = -sign; u = -u; }
    logdet += std::log(u);
  }
  // on the ordered sector the coupling determinant is positive
  if (sign <= 0) return -1e300;
  return logdet + s * (yb * x.sum() + xb * y.sum() - n * xb * yb);
}

inline double log_density(const ValidatedModel& vm, const VectorXd& x,
                          const VectorXd& y) {
  const int n = static_cast<int>(x.size());
  const double s = vm.s();
  double lp = log_coupling_det(x, y, s);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      lp += std::log(x[i] - x[j]) + std::log(y[i] - y[j]);
  for (int i = 0; i < n; ++i)
    lp -= s * (vm.spec.v1.value(x[i]) + vm.spec.v2.value(y[i]));
  return lp;
}

}  // namespace detail

inline SamplerResult metropolis_sampler(const ValidatedModel& vm, long steps,
                                        std::uint64_t seed) {
  const int N = vm.spec.N;
  if (N > 8) throw ChainNotMixed("sampler limited to N <= 8");
  Rng rng(seed);

  // start from spread-out ordered configurations
  VectorXd x(N), y(N);
  for (int i = 0; i < N; ++i) {
    x[i] = -1.0 + 2.0 * (i + 0.5) / N;
    y[i] = x[i];
  }
  double lp = detail::log_density(vm, x, y);
  double step = 0.5 / std::sqrt(static_cast<double>(N));

  long proposals = 0, accepted = 0;
  long tune_prop = 0, tune_acc = 0;
  const long sweep = 2L * N;
  const long burn_sweeps = std::max(500L, steps / (10 * sweep));
  const int thin_sweeps = 5;

  auto do_move = [&](bool tuning) {
    bool on_x = rng.uniform() < 0.5;
    VectorXd& v = on_x ? x : y;
    int i = rng.index(N);
    double old = v[i];
    double prop = old + step * rng.gaussian();
    ++proposals;
    if (tuning) ++tune_prop;
    // ordering enforced by rejection
    if ((i > 0 && prop <= v[i - 1]) || (i + 1 < N && prop >= v[i + 1])) return;
    v[i] = prop;
    double lp_new = detail::log_density(vm, x, y);
    if (std::log(rng.uniform() + 1e-300) < lp_new - lp) {
      lp = lp_new;
      ++accepted;
      if (tuning) ++tune_acc;
    } else {
      v[i] = old;
    }
  };

  // burn-in with step adaptation
  for (long sw = 0; sw < burn_sweeps; ++sw) {
    for (long k = 0; k < sweep; ++k) do_move(true);
    if (sw % 50 == 49) {
      double acc = tune_acc / std::max(1.0, static_cast<double>(tune_prop));
      if (acc > 0.5) step *= 1.25;
      else if (acc < 0.25) step /= 1.25;
      tune_prop = tune_acc = 0;
    }
  }

  proposals = accepted = 0;
  long n_rec = steps / (sweep * thin_sweeps);
  SamplerResult out;
  out.xs.resize(n_rec, N);
  out.ys.resize(n_rec, N);
  for (long r = 0; r < n_rec; ++r) {
    for (int t = 0; t < thin_sweeps; ++t)
      for (long k = 0; k < sweep; ++k) do_move(false);
    out.xs.row(r) = x.transpose();
    out.ys.row(r) = y.transpose();
  }
  out.diag.acceptance = accepted / std::max(1.0, static_cast<double>(proposals));
  out.diag.step = step;
  out.diag.recorded = static_cast<int>(n_rec);
  out.diag.burn_sweeps = static_cast<int>(burn_sweeps);
  out.diag.thin_sweeps = thin_sweeps;
  if (out.diag.acceptance < 0.1 || out.diag.acceptance > 0.7)
    throw ChainNotMixed("acceptance rate " + std::to_string(out.diag.acceptance));
  return out;
}

// histogram of all x-coordinates with batch-means error bars
struct Histogram {
  VectorXd centers, density, sigma;
};

inline Histogram histogram_x(const SamplerResult& res, double lo, double hi,
                             int nbins, int nbatches = 64) {
  const long rows = res.xs.rows();
  const int N = static_cast<int>(res.xs.cols());
  const double w = (hi - lo) / nbins;
  Histogram h;
  h.centers.resize(nbins);
  for (int b = 0; b < nbins; ++b) h.centers[b] = lo + (b + 0.5) * w;
  MatrixXd batch = MatrixXd::Zero(nbatches, nbins);
  VectorXd batch_rows = VectorXd::Zero(nbatches);
  long per = std::max(1L, rows / nbatches);
  for (long r = 0; r < rows; ++r) {
    int bt = static_cast<int>(std::min<long>(r / per, nbatches - 1));
    batch_rows[bt] += 1.0;
    for (int i = 0; i < N; ++i) {
      double t = (res.xs(r, i) - lo) / w;
      if (t < 0.0 || t >= nbins) continue;
      batch(bt, static_cast<int>(t)) += 1.0;
    }
  }
  // normalized one-point density per batch: counts / (rows * N * w)
  h.density.resize(nbins);
  h.sigma.resize(nbins);
  for (int b = 0; b < nbins; ++b) {
    VectorXd col = batch.col(b).array() /
                   (batch_rows.array() * static_cast<double>(N) * w);
    double mean = col.mean();
    double var = (col.array() - mean).square().sum() / (nbatches - 1);
    h.density[b] = mean;
    h.sigma[b] = std::sqrt(var / nbatches);
  }
  return h;
}

}  // namespace bimatrix
