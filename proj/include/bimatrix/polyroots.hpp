// Polynomial root finding via the companion matrix.
#pragma once

#include <vector>

#include "bimatrix/types.hpp"

namespace bimatrix {

// Roots of c[0] + c[1] z + ... + c[n] z^n, c[n] != 0.
inline std::vector<Complex> poly_roots(const std::vector<Complex>& c) {
  int n = static_cast<int>(c.size()) - 1;
  while (n > 0 && std::abs(c[n]) == 0.0) --n;
  if (n <= 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<Complex> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

inline std::vector<Complex> poly_roots(const std::vector<double>& c) {
  std::vector<Complex> cc(c.begin(), c.end());
  return poly_roots(cc);
}

inline std::vector<double> real_roots(const std::vector<double>& c,
                                      double imag_tol = 1e-9) {
  std::vector<double> out;
  for (const auto& r : poly_roots(c))
    if (std::abs(r.imag()) < imag_tol * (1.0 + std::abs(r.real())))
      out.push_back(r.real());
  return out;
}

}  // namespace bimatrix
