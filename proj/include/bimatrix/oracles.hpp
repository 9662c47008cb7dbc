// Brute-force quadrature oracles for small N: eigenvalue densities, the
// partition function and the Heine characteristic-polynomial average.
// These deliberately stay independent of the orthogonalization path.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "bimatrix/potential.hpp"
#include "bimatrix/quadrature.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

namespace detail {

// tensor Gauss-Legendre over [-R,R]^dim of f(u[0..dim-1])
inline double tensor_integral(const std::function<double(const double*)>& f,
                              double R, int dim, int order) {
  const QuadRule<double>& r = gauss_legendre_cached<double>(order);
  std::vector<int> idx(dim, 0);
  std::vector<double> u(dim), w(dim);
  double acc = 0.0;
  while (true) {
    double wt = 1.0;
    for (int d = 0; d < dim; ++d) {
      u[d] = R * r.x[idx[d]];
      wt *= R * r.w[idx[d]];
    }
    acc += wt * f(u.data());
    int d = 0;
    while (d < dim && ++idx[d] == order) idx[d++] = 0;
    if (d == dim) break;
  }
  return acc;
}

inline double vandermonde(const double* v, int n) {
  double p = 1.0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) p *= v[i] - v[j];
  return p;
}

}  // namespace detail

// ordered-coupling eigenvalue weight Delta(x) Delta(y) prod exp(-s(V1+V2-x_i y_i))
inline double eigenvalue_weight(const ValidatedModel& vm, const double* x,
                                const double* y, int n) {
  double s = vm.s();
  double e = 0.0;
  for (int i = 0; i < n; ++i)
    e += vm.spec.v1.value(x[i]) + vm.spec.v2.value(y[i]) - x[i] * y[i];
  return detail::vandermonde(x, n) * detail::vandermonde(y, n) * std::exp(-s * e);
}

// Z_N = int Delta(x) Delta(y) prod exp(-s(V1+V2-x_i y_i)) for N <= 3.
// N <= 2 is a plain tensor integral; N = 3 expands Delta(y) into 1d moments.
inline double partition_function_smallN(const ValidatedModel& vm,
                                        int order = 96) {
  const int N = vm.spec.N;
  if (N > 3) throw OracleTooLarge("partition function oracle limited to N <= 3");
  const double R = vm.R;
  const double s = vm.s();
  if (N <= 2) {
    auto f = [&](const double* u) {
      return eigenvalue_weight(vm, u, u + N, N);
    };
    return detail::tensor_integral(f, R, 2 * N, order);
  }
  // N = 3: int dy y^k exp(-s(V2(y) - x y)) for k = 0..2, then det over rows
  auto ymom = [&](double x, int k) {
    auto g = [&](double y) {
      return std::pow(y, k) * std::exp(-s * (vm.spec.v2.value(y) - x * y));
    };
    return integrate<double>(g, -R, R, 256);
  };
  auto f = [&](const double* x) {
    Eigen::Matrix3d m;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m(k, j) = ymom(x[j], k);
    double e = 0.0;
    for (int i = 0; i < 3; ++i) e += vm.spec.v1.value(x[i]);
    return detail::vandermonde(x, 3) * m.determinant() * std::exp(-s * e);
  };
  return detail::tensor_integral(f, R, 3, 64);
}

// normalized marginal densities rho_{r;s} for N <= 2 (r, s in {0,1}),
// integrating the eigenvalue measure directly; int rho_{1;0} = 1.
class DirectDensityOracle {
 public:
  explicit DirectDensityOracle(const ValidatedModel& vm, int order = 96)
      : vm_(vm), order_(order) {
    if (vm.spec.N > 2) throw OracleTooLarge("density oracle limited to N <= 2");
    z_ = partition_function_smallN(vm, order);
  }

  // rho_{1;0}(x): marginal of one x-eigenvalue
  double rho10(double x) const {
    const int N = vm_.spec.N;
    const double R = vm_.R;
    if (N == 1) {
      auto f = [&](const double* u) {
        double v[1] = {x};
        return eigenvalue_weight(vm_, v, u, 1);
      };
      return detail::tensor_integral(f, R, 1, 2 * order_) / z_;
    }
    auto f = [&](const double* u) {
      double xs[2] = {x, u[0]};
      return eigenvalue_weight(vm_, xs, u + 1, 2);
    };
    return detail::tensor_integral(f, R, 3, order_) / z_;
  }

  double rho01(double y) const {
    const int N = vm_.spec.N;
    const double R = vm_.R;
    if (N == 1) {
      auto f = [&](const double* u) {
        double v[1] = {y};
        return eigenvalue_weight(vm_, u, v, 1);
      };
      return detail::tensor_integral(f, R, 1, 2 * order_) / z_;
    }
    auto f = [&](const double* u) {
      double ys[2] = {y, u[2]};
      return eigenvalue_weight(vm_, u, ys, 2);
    };
    return detail::tensor_integral(f, R, 3, order_) / z_;
  }

  // rho_{1;1}(x; y): joint marginal of one x- and one y-eigenvalue. For
  // N = 2 the coupling determinant no longer collapses to its diagonal
  // (y_1 is pinned), so integrate the det(e^{s x_i y_j}) form.
  double rho11(double x, double y) const {
    const int N = vm_.spec.N;
    const double R = vm_.R;
    if (N == 1) {
      double xs[1] = {x}, ys[1] = {y};
      return eigenvalue_weight(vm_, xs, ys, 1) / z_;
    }
    const double s = vm_.s();
    auto f = [&](const double* u) {
      double xs[2] = {x, u[0]};
      double ys[2] = {y, u[1]};
      double det = std::exp(s * (xs[0] * ys[0] + xs[1] * ys[1])) -
                   std::exp(s * (xs[0] * ys[1] + xs[1] * ys[0]));
      double e = 0.0;
      for (int i = 0; i < 2; ++i)
        e += vm_.spec.v1.value(xs[i]) + vm_.spec.v2.value(ys[i]);
      return detail::vandermonde(xs, 2) * detail::vandermonde(ys, 2) * det *
             std::exp(-s * e);
    };
    return detail::tensor_integral(f, R, 2, order_) / (2.0 * z_);
  }

  double z() const { return z_; }

 private:
  ValidatedModel vm_;
  int order_;
  double z_;
};

// Heine: pi_n(x) = < det(x - M1) > over the n x n model with the same weight
// exponent s = N/T.  Brute force for n <= 2.
inline double heine_pi_oracle(const ValidatedModel& vm, int n, double x,
                              int order = 96) {
  if (n > 2) throw OracleTooLarge("Heine oracle limited to n <= 2");
  if (n == 0) return 1.0;
  const double R = vm.R;
  auto zf = [&](const double* u) { return eigenvalue_weight(vm, u, u + n, n); };
  auto pf = [&](const double* u) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= x - u[i];
    return p * eigenvalue_weight(vm, u, u + n, n);
  };
  double z = detail::tensor_integral(zf, R, 2 * n, order);
  double p = detail::tensor_integral(pf, R, 2 * n, order);
  return p / z;
}

// 2d quadrature oracle for the N = 1 mixed resolvent
// <(x - M1)^-1 (y - M2)^-1>; requires |x|,|y| beyond the integration box.
inline double mixed_resolvent_oracle_n1(const ValidatedModel& vm, double x,
                                        double y, int order = 256) {
  if (vm.spec.N != 1) throw OracleTooLarge("mixed resolvent oracle is N = 1 only");
  double R = std::min(vm.R, 0.9 * std::min(std::abs(x), std::abs(y)));
  auto num = [&](const double* u) {
    return eigenvalue_weight(vm, u, u + 1, 1) / ((x - u[0]) * (y - u[1]));
  };
  auto den = [&](const double* u) { return eigenvalue_weight(vm, u, u + 1, 1); };
  return detail::tensor_integral(num, R, 2, order) /
         detail::tensor_integral(den, R, 2, order);
}

}  // namespace bimatrix
