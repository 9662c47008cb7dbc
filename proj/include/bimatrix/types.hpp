// Scalar types, Eigen aliases and the error hierarchy shared by all modules.
#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/float128.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <complex>
#include <stdexcept>
#include <string>

namespace bimatrix {

// 113-bit extended scalar (~33 decimal digits). Selected at runtime through
// BIMATRIX_PRECISION=extended; the numeric core is templated on the scalar.
using Quad = boost::multiprecision::float128;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;
using Complex = std::complex<double>;

inline double to_double(double x) { return x; }
inline double to_double(const Quad& x) { return static_cast<double>(x); }

template <class Scalar>
Scalar pi_const() {
  using std::acos;
  return acos(Scalar(-1));
}

struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& what)
      : std::runtime_error(c + ": " + what), code(std::move(c)) {}
};

#define BIMATRIX_ERROR(Name)                                            \
  struct Name : Error {                                                 \
    explicit Name(const std::string& w = std::string()) : Error(#Name, w) {} \
  }

BIMATRIX_ERROR(NonHermitianModel);
BIMATRIX_ERROR(QuadratureNotConverged);
BIMATRIX_ERROR(OracleTooLarge);
BIMATRIX_ERROR(SingularMinor);
BIMATRIX_ERROR(TruncationTooSmall);
BIMATRIX_ERROR(UnsupportedOrder);
BIMATRIX_ERROR(ChainNotMixed);
BIMATRIX_ERROR(ConstructionsDisagree);
BIMATRIX_ERROR(InterpolationInconsistent);
BIMATRIX_ERROR(NearDegenerateSpectrum);
BIMATRIX_ERROR(SingularShift);
BIMATRIX_ERROR(TruncationNotConverged);
BIMATRIX_ERROR(NewtonDiverged);
BIMATRIX_ERROR(DegenerateBranchPoint);
BIMATRIX_ERROR(CoincidentPoints);
BIMATRIX_ERROR(OutsideCut);
BIMATRIX_ERROR(PathCrossesCut);
BIMATRIX_ERROR(InsideCutRegion);
BIMATRIX_ERROR(ConfigInvalid);

#undef BIMATRIX_ERROR

}  // namespace bimatrix
