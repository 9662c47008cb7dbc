// Genus-0 solution of the master loop equation: rational parameterization
// x(z) = gamma z + sum a_k z^-k, y(z) = gamma~/z + sum b_k z^k fixed by the
// residue conditions at the two infinities, plus the residue-calculus
// observables living on the curve.
#pragma once

#include <vector>

#include "bimatrix/laurent.hpp"
#include "bimatrix/polyroots.hpp"
#include "bimatrix/potential.hpp"
#include "bimatrix/quadrature.hpp"
#include "bimatrix/types.hpp"

namespace bimatrix {

struct RationalSpectralCurve {
  ModelSpec model;
  int d1 = 1, d2 = 1;
  double T = 1.0;
  double gamma = 0.0;    // x ~ gamma z at z -> inf
  double gamma_t = 0.0;  // y ~ gamma_t / z at z -> 0
  VectorXd a;            // a[0..d2]
  VectorXd b;            // b[0..d1]
  double residual = 0.0;
  std::vector<Complex> branch_x;  // zeros of dx
  std::vector<Complex> branch_y;  // zeros of dy

  template <class S>
  S x(const S& z) const {
    S acc(a[d2]);
    for (int k = d2 - 1; k >= 0; --k) acc = acc / z + S(a[k]);
    return acc + S(gamma) * z;
  }
  template <class S>
  S y(const S& z) const {
    S acc(b[d1]);
    for (int k = d1 - 1; k >= 0; --k) acc = acc * z + S(b[k]);
    return acc + S(gamma_t) / z;
  }
  template <class S>
  S dx(const S& z) const {
    S acc(0);
    for (int k = 1; k <= d2; ++k) acc += S(-k * a[k]) * pow(z, S(-k - 1));
    return acc + S(gamma);
  }
  template <class S>
  S dy(const S& z) const {
    S acc(S(-gamma_t));
    acc /= z * z;
    for (int k = 1; k <= d1; ++k) acc += S(k * b[k]) * pow(z, S(k - 1));
    return acc;
  }
  double ddx(double z) const {
    double acc = 0.0;
    for (int k = 1; k <= d2; ++k) acc += k * (k + 1) * a[k] * std::pow(z, -k - 2);
    return acc;
  }
  double dddx(double z) const {
    double acc = 0.0;
    for (int k = 1; k <= d2; ++k)
      acc -= k * (k + 1) * (k + 2) * a[k] * std::pow(z, -k - 3);
    return acc;
  }
  double ddy(double z) const {
    double acc = 2.0 * gamma_t / (z * z * z);
    for (int k = 2; k <= d1; ++k) acc += k * (k - 1) * b[k] * std::pow(z, k - 2);
    return acc;
  }
  double dddy(double z) const {
    double acc = -6.0 * gamma_t / (z * z * z * z);
    for (int k = 3; k <= d1; ++k)
      acc += k * (k - 1) * (k - 2) * b[k] * std::pow(z, k - 3);
    return acc;
  }

  // Laurent data in the local coordinates: t = 1/z at infinity_x, z itself
  // at infinity_y
  Laurent x_at_infx() const {
    Laurent f = Laurent::monomial(gamma, -1);
    for (int k = 0; k <= d2; ++k) f = f + Laurent::monomial(a[k], k);
    return f.trim();
  }
  Laurent y_at_infx() const {
    Laurent f = Laurent::monomial(gamma_t, 1);
    for (int k = 0; k <= d1; ++k) f = f + Laurent::monomial(b[k], -k);
    return f.trim();
  }
  Laurent x_at_infy() const {
    Laurent f = Laurent::monomial(gamma, 1);
    for (int k = 0; k <= d2; ++k) f = f + Laurent::monomial(a[k], -k);
    return f.trim();
  }
  Laurent y_at_infy() const {
    Laurent f = Laurent::monomial(gamma_t, -1);
    for (int k = 0; k <= d1; ++k) f = f + Laurent::monomial(b[k], k);
    return f.trim();
  }

  // edge of the x-support: max over real branch points of |x(e)|
  double cut_edge() const {
    double edge = 0.0;
    for (const Complex& e : branch_x)
      if (std::abs(e.imag()) < 1e-8)
        edge = std::max(edge, std::abs(x(Complex(e)).real()));
    return edge;
  }
};

namespace detail {

inline Laurent potential_dv_of(const Potential& v, const Laurent& f) {
  Laurent acc = Laurent::monomial(v.g[v.deg()], 0);
  for (int k = v.deg() - 1; k >= 1; --k)
    acc = acc * f + Laurent::monomial(v.g[k], 0);
  return acc;
}

// packed unknowns: gamma, a[0..d2], gamma_t, b[0..d1]
inline VectorXd curve_residuals(const ModelSpec& m, int d1, int d2,
                                const VectorXd& u) {
  RationalSpectralCurve c;
  c.model = m;
  c.d1 = d1;
  c.d2 = d2;
  c.T = m.T;
  c.gamma = u[0];
  c.a = u.segment(1, d2 + 1);
  c.gamma_t = u[d2 + 2];
  c.b = u.segment(d2 + 3, d1 + 1);

  // at infinity_x (z -> inf): y - V1'(x) + T/x = O(z^-2)
  // in the z variable: powers z^{d1} .. z^0 of y - V1'(x) vanish and the
  // z^-1 coefficient equals -T/gamma (the 1/x series starts at T/(gamma z))
  Laurent xz = Laurent::monomial(c.gamma, 1);
  for (int k = 0; k <= d2; ++k) xz = xz + Laurent::monomial(c.a[k], -k);
  Laurent yz = Laurent::monomial(c.gamma_t, -1);
  for (int k = 0; k <= d1; ++k) yz = yz + Laurent::monomial(c.b[k], k);
  Laurent r1 = yz - potential_dv_of(m.v1, xz);
  Laurent r2 = xz - potential_dv_of(m.v2, yz);

  VectorXd res(d1 + d2 + 5);
  int idx = 0;
  for (int k = d1; k >= 0; --k) res[idx++] = r1.coeff(k);
  res[idx++] = r1.coeff(-1) + m.T / c.gamma;
  for (int k = d2; k >= 0; --k) res[idx++] = r2.coeff(-k);
  res[idx++] = r2.coeff(1) + m.T / c.gamma_t;
  res[idx++] = c.gamma - c.gamma_t;  // gauge: z-scale fixed symmetrically
  return res;
}

inline bool gauss_newton_curve(const ModelSpec& m, int d1, int d2, VectorXd& u) {
  const int nu = static_cast<int>(u.size());
  for (int it = 0; it < 60; ++it) {
    VectorXd r = curve_residuals(m, d1, d2, u);
    double rn = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(rn)) return false;
    if (rn < 1e-13) return true;
    MatrixXd J(r.size(), nu);
    for (int j = 0; j < nu; ++j) {
      double h = 1e-7 * std::max(1.0, std::abs(u[j]));
      VectorXd up = u, um = u;
      up[j] += h;
      um[j] -= h;
      J.col(j) = (curve_residuals(m, d1, d2, up) -
                  curve_residuals(m, d1, d2, um)) / (2 * h);
    }
    VectorXd step = J.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) return false;
    // damped update
    double lambda = 1.0;
    for (int half = 0; half < 8; ++half) {
      VectorXd un = u + lambda * step;
      if (curve_residuals(m, d1, d2, un).cwiseAbs().maxCoeff() < rn * 1.5) {
        u = un;
        break;
      }
      lambda /= 2;
      if (half == 7) u += lambda * step;
    }
  }
  return curve_residuals(m, d1, d2, u).cwiseAbs().maxCoeff() < 1e-12;
}

}  // namespace detail

// one-cut solve by continuation from the decoupled gaussian closed form
inline RationalSpectralCurve solve_genus0_curve(const ModelSpec& m) {
  const int d1 = m.v1.deg_dv(), d2 = m.v2.deg_dv();
  const double g2 = m.v1.g[2], g2t = m.v2.g[2];
  if (!(g2 > 0.0) || !(g2 * g2t > 1.0))
    throw NewtonDiverged("gaussian continuation needs a positive quadratic core");

  VectorXd u = VectorXd::Zero(d1 + d2 + 4);
  double gam = std::sqrt(m.T / (g2 * g2t - 1.0));
  u[0] = gam;                 // gamma
  u[2] = g2t * gam;           // a[1]
  u[d2 + 2] = gam;            // gamma_t
  u[d2 + 4] = g2 * gam;       // b[1]

  // continuation in the non-quadratic couplings
  double tau = 0.0;
  double step = 1.0;
  while (tau < 1.0) {
    double target = std::min(1.0, tau + step);
    ModelSpec mt = m;
    for (int k = 3; k <= m.v1.deg(); ++k) mt.v1.g[k] *= target;
    for (int k = 3; k <= m.v2.deg(); ++k) mt.v2.g[k] *= target;
    VectorXd ut = u;
    if (detail::gauss_newton_curve(mt, d1, d2, ut)) {
      u = ut;
      tau = target;
      step = std::min(1.0, step * 2);
    } else {
      step /= 2;
      if (step < 1e-3)
        throw NewtonDiverged("continuation stalled; likely multi-cut regime");
    }
  }

  RationalSpectralCurve c;
  c.model = m;
  c.d1 = d1;
  c.d2 = d2;
  c.T = m.T;
  c.gamma = u[0];
  c.a = u.segment(1, d2 + 1);
  c.gamma_t = u[d2 + 2];
  c.b = u.segment(d2 + 3, d1 + 1);
  c.residual = detail::curve_residuals(m, d1, d2, u).cwiseAbs().maxCoeff();

  // branch points: zeros of x'(z) z^{d2+1} and y'(z) z^2
  {
    std::vector<double> px(d2 + 2, 0.0);
    px[d2 + 1] = c.gamma;
    for (int k = 1; k <= d2; ++k) px[d2 - k] = -k * c.a[k];
    c.branch_x = poly_roots(px);
    std::vector<double> py(d1 + 2, 0.0);
    py[0] = -c.gamma_t;
    for (int k = 1; k <= d1; ++k) py[k + 1] = k * c.b[k];
    c.branch_y = poly_roots(py);
  }
  return c;
}

// physical-sheet solver: the root of x(z) = x with z ~ x / gamma
inline Complex physical_z_of_x(const RationalSpectralCurve& c, Complex x) {
  std::vector<Complex> pc(c.d2 + 2);
  pc[c.d2 + 1] = c.gamma;
  pc[c.d2] = c.a[0] - x;
  for (int k = 1; k <= c.d2; ++k) pc[c.d2 - k] = c.a[k];
  std::vector<Complex> roots = poly_roots(pc);
  Complex best = roots[0];
  for (const Complex& r : roots)
    if (std::abs(r) > std::abs(best)) best = r;
  return best;
}

// all preimages of x
inline std::vector<Complex> all_z_of_x(const RationalSpectralCurve& c,
                                       Complex x) {
  std::vector<Complex> pc(c.d2 + 2);
  pc[c.d2 + 1] = c.gamma;
  pc[c.d2] = c.a[0] - x;
  for (int k = 1; k <= c.d2; ++k) pc[c.d2 - k] = c.a[k];
  return poly_roots(pc);
}

// physical sheet at infinity_y: the root of y(z) = y with z ~ gamma_t / y
inline Complex physical_z_of_y(const RationalSpectralCurve& c, Complex y) {
  std::vector<Complex> pc(c.d1 + 2);
  pc[0] = c.gamma_t;
  pc[1] = c.b[0] - y;
  for (int k = 1; k <= c.d1; ++k) pc[k + 1] = c.b[k];
  std::vector<Complex> roots = poly_roots(pc);
  Complex best = roots[0];
  for (const Complex& r : roots)
    if (std::abs(r) < std::abs(best)) best = r;
  return best;
}

inline double Y_physical(const RationalSpectralCurve& c, double x) {
  return c.y(Complex(physical_z_of_x(c, Complex(x, 0)))).real();
}
inline double X_physical(const RationalSpectralCurve& c, double y) {
  return c.x(Complex(physical_z_of_y(c, Complex(y, 0)))).real();
}

// T_k = (1/T) Res_{inf_x} x^k y dx by exact coefficient reads
inline double leading_moment(const RationalSpectralCurve& c, int k) {
  Laurent xt = c.x_at_infx();
  Laurent yt = c.y_at_infx();
  Laurent form = laurent_pow(xt, k) * yt * laurent_derivative(xt);
  return laurent_residue(form) / c.T;
}

struct FreeEnergyDerivatives {
  VectorXd dF_dg;    // index k = 1..d1+1
  VectorXd dF_dgt;   // index k = 1..d2+1
  double dF_dT = 0.0;
  double F0 = 0.0;
};

namespace detail {

// tail-resummed path integral int_{inf_x}^{z_p} (y - V1'(x) + T/x) dx along
// the real axis; valid for z_p real beyond the branch points
inline double effective_integral_x(const RationalSpectralCurve& c, double zp,
                                   int depth = 60) {
  Laurent xt = c.x_at_infx();
  Laurent yt = c.y_at_infx();
  Laurent xinv = laurent_inverse(xt, depth);
  Laurent integrand =
      (yt - detail::potential_dv_of(c.model.v1, xt) + c.T * xinv) *
      laurent_derivative(xt);
  // integrand in t = 1/z; as a form in z: f(t(z)) dz = -f(t) / t^2 ... use
  // the z-series directly: g(z) = integrand_t(t) * dt/dz = numbers; easier:
  // rebuild as a z-series: coefficient of z^-k is coeff of t^{k} of
  // (-integrand / t^2)
  // anti-derivative in z of sum_k c_k z^{-k}: the k = 1 term vanishes by the
  // residue condition
  double radius = 1.0;
  for (const Complex& e : c.branch_x) radius = std::max(radius, std::abs(e));
  std::vector<Complex> xzero = all_z_of_x(c, Complex(0.0, 0.0));
  for (const Complex& r : xzero) radius = std::max(radius, std::abs(r));
  double z0 = 4.0 * radius;
  if (std::abs(zp) < 1.2 * radius)
    throw PathCrossesCut("probe point too close to the branch points");
  // series part from infinity to z0 (signed with the direction of zp)
  double z0s = zp > 0 ? z0 : -z0;
  double tail = 0.0;
  for (int k = 2; k < depth - 2; ++k) {
    double ck = -integrand.coeff(k - 2);  // z^-k coefficient of f(z)
    tail += ck * std::pow(z0s, 1 - k) / (1 - k);
  }
  if (std::abs(integrand.coeff(-1)) > 1e-10)
    throw Error("CurveError", "unexpected residue in the effective integrand");
  // quadrature from z0 to zp
  auto f = [&](double z) {
    double xv = c.x(z);
    return (c.y(z) - c.model.v1.dvalue(xv) + c.T / xv) * c.dx(z);
  };
  double leg = integrate_adaptive<double>(f, z0s, zp, 1e-12, 64, 4096);
  return tail + leg;
}

// int_{inf_y}^{z_p} (x - V2'(y) + T/y) dy; infinity_y sits at z = 0
inline double effective_integral_y(const RationalSpectralCurve& c, double zp,
                                   int depth = 60) {
  Laurent xz = c.x_at_infy();
  Laurent yz = c.y_at_infy();
  Laurent yinv = laurent_inverse(yz, depth);
  Laurent integrand =
      (xz - detail::potential_dv_of(c.model.v2, yz) + c.T * yinv) *
      laurent_derivative(yz);
  // integrand starts at z^0 and has no z^-1 term
  double radius = 1e9;
  for (const Complex& e : c.branch_y) radius = std::min(radius, std::abs(e));
  std::vector<Complex> pc(c.d1 + 2);
  pc[0] = c.gamma_t;
  pc[1] = c.b[0];
  for (int k = 1; k <= c.d1; ++k) pc[k + 1] = c.b[k];
  for (const Complex& r : poly_roots(pc)) radius = std::min(radius, std::abs(r));
  double z1 = radius / 4.0;
  if (std::abs(integrand.coeff(-1)) > 1e-10 ||
      std::abs(integrand.coeff(-2)) > 1e-10)
    throw Error("CurveError", "unexpected singular part at infinity_y");
  double z1s = zp > 0 ? z1 : -z1;
  double tail = 0.0;
  for (int k = 0; k < depth - 2; ++k)
    tail += integrand.coeff(k) * std::pow(z1s, k + 1) / (k + 1);
  auto f = [&](double z) {
    double yv = c.y(z);
    return (c.x(z) - c.model.v2.dvalue(yv) + c.T / yv) * c.dy(z);
  };
  double leg = integrate_adaptive<double>(f, z1s, zp, 1e-12, 64, 4096);
  return tail + leg;
}

}  // namespace detail

// dF/dT via the regularized integral, evaluated at probe point z_p
inline double free_energy_dT(const RationalSpectralCurve& c, double zp) {
  double i1 = detail::effective_integral_x(c, zp);
  double i2 = detail::effective_integral_y(c, zp);
  double xv = c.x(zp), yv = c.y(zp);
  if (xv <= 0.0 || yv <= 0.0)
    throw PathCrossesCut("probe point must keep x(p), y(p) positive");
  return i1 + i2 + c.model.v1.value(xv) + c.model.v2.value(yv) - xv * yv -
         c.T * std::log(xv) - c.T * std::log(yv);
}

inline FreeEnergyDerivatives free_energy_derivatives(
    const RationalSpectralCurve& c, double probe = -1.0) {
  FreeEnergyDerivatives out;
  Laurent xt = c.x_at_infx();
  Laurent yt = c.y_at_infx();
  Laurent dxt = laurent_derivative(xt);
  out.dF_dg.resize(c.model.v1.deg() + 1);
  out.dF_dg[0] = 0.0;
  for (int k = 1; k <= c.model.v1.deg(); ++k)
    out.dF_dg[k] = laurent_residue(laurent_pow(xt, k) * yt * dxt) / k;
  Laurent xz = c.x_at_infy();
  Laurent yz = c.y_at_infy();
  Laurent dyz = laurent_derivative(yz);
  out.dF_dgt.resize(c.model.v2.deg() + 1);
  out.dF_dgt[0] = 0.0;
  for (int k = 1; k <= c.model.v2.deg(); ++k)
    out.dF_dgt[k] = laurent_residue(laurent_pow(yz, k) * xz * dyz) / k;

  double zp = probe;
  if (zp < 0) {
    double radius = 1.0;
    for (const Complex& e : c.branch_x) radius = std::max(radius, std::abs(e));
    zp = 2.5 * radius;
  }
  out.dF_dT = free_energy_dT(c, zp);

  // F0 = 1/2 (sum_k g_k dF/dg_k + sum_k g~_k dF/dg~_k + T dF/dT
  //           - 1/2 Res_{inf_x} x y^2 dx)
  double acc = 0.0;
  for (int k = 1; k <= c.model.v1.deg(); ++k)
    acc += c.model.v1.g[k] * out.dF_dg[k];
  for (int k = 1; k <= c.model.v2.deg(); ++k)
    acc += c.model.v2.g[k] * out.dF_dgt[k];
  acc += c.T * out.dF_dT;
  acc -= 0.5 * laurent_residue(xt * yt * yt * dxt);
  out.F0 = 0.5 * acc;
  return out;
}

// genus-0 two-point functions from the Bergmann kernel dz dz'/(z-z')^2
struct TwoPointValues {
  double w11 = 0.0, w22 = 0.0, w12 = 0.0;
};

inline TwoPointValues bergmann_two_point(const RationalSpectralCurve& c,
                                         double z1, double z2) {
  TwoPointValues out;
  double dx1 = c.dx(z1), dx2 = c.dx(z2);
  double dy1 = c.dy(z1), dy2 = c.dy(z2);
  if (z1 == z2) {
    // diagonal limit: -S_z(x)(z) / (6 x'(z)^2) with S the schwarzian
    auto schwarz_ratio = [&](double d1v, double d2v, double d3v) {
      double s = d3v / d1v - 1.5 * (d2v / d1v) * (d2v / d1v);
      return -s / (6.0 * d1v * d1v);
    };
    out.w11 = schwarz_ratio(c.dx(z1), c.ddx(z1), c.dddx(z1));
    out.w22 = schwarz_ratio(c.dy(z1), c.ddy(z1), c.dddy(z1));
    out.w12 = 0.0;  // not defined on the diagonal
    return out;
  }
  double b = 1.0 / ((z1 - z2) * (z1 - z2));
  double x1 = c.x(z1), x2 = c.x(z2);
  double y1 = c.y(z1), y2 = c.y(z2);
  out.w11 = b / (dx1 * dx2) - 1.0 / ((x1 - x2) * (x1 - x2));
  out.w22 = b / (dy1 * dy2) - 1.0 / ((y1 - y2) * (y1 - y2));
  out.w12 = -b / (dx1 * dy2);
  return out;
}

// subleading resolvent W_1^{(1)}(x(p)) by the double residue at the branch
// points, evaluated with nested circle quadratures
class SubleadingResolvent {
 public:
  explicit SubleadingResolvent(const RationalSpectralCurve& c) : c_(&c) {
    for (const Complex& e : c.branch_x) {
      double dist = 1e18;
      for (const Complex& o : c.branch_x)
        if (std::abs(o - e) > 1e-12) dist = std::min(dist, std::abs(o - e));
      dist = std::min(dist, std::abs(e));  // keep away from z = 0
      radii_.push_back(dist / 6.0);
      if (std::abs(c.ddx(e.real())) < 1e-10 && std::abs(e.imag()) < 1e-10)
        throw DegenerateBranchPoint("x''(e) vanishes");
    }
  }

  // value of W_1^{(1)}(x(p)) at a point p off the branch-point circles.
  // The overall sign is pinned by the exact gaussian moment
  // T_4^{(1)} = t^2 (and T_6^{(1)} = 10 t^3).
  Complex value(Complex p) const {
    Complex acc(0.0, 0.0);
    for (size_t i = 0; i < c_->branch_x.size(); ++i)
      acc += outer_residue(c_->branch_x[i], radii_[i], p);
    return -0.5 * acc / (c_->T * c_->dx(p));
  }

  // residue of W_1^{(1)} dx at branch point i (should vanish)
  Complex residue_at_branch(int i, int nodes = 256) const {
    Complex e = c_->branch_x[i];
    double r = 2.5 * radii_[i];
    Complex acc(0.0, 0.0);
    for (int k = 0; k < nodes; ++k) {
      double th = 2 * M_PI * k / nodes;
      Complex z = e + r * Complex(std::cos(th), std::sin(th));
      Complex dz = r * Complex(-std::sin(th), std::cos(th)) *
                   (2 * M_PI / nodes);
      acc += value(z) * c_->dx(z) * dz;
    }
    return acc / Complex(0.0, 2 * M_PI);
  }

  // 1/N^2 coefficient of <tr M1^k>/N: the x^{-k-1} part of W_1^{(1)}
  double moment(int k, int nodes = 256) const {
    double R = 1.0;
    for (const Complex& e : c_->branch_x) R = std::max(R, std::abs(e));
    R *= 3.0;
    Complex acc(0.0, 0.0);
    for (int q = 0; q < nodes; ++q) {
      double th = 2 * M_PI * q / nodes;
      Complex z = R * Complex(std::cos(th), std::sin(th));
      Complex dz = R * Complex(-std::sin(th), std::cos(th)) * (2 * M_PI / nodes);
      acc += pow(c_->x(z), Complex(k)) * value(z) * c_->dx(z) * dz;
    }
    return (acc / Complex(0.0, 2 * M_PI)).real();
  }

 private:
  // Res_{q -> e} [ inner(q) dq ] over the circle of radius r
  Complex outer_residue(Complex e, double r, Complex p, int nodes = 128) const {
    Complex acc(0.0, 0.0);
    for (int k = 0; k < nodes; ++k) {
      double th = 2 * M_PI * k / nodes;
      Complex q = e + r * Complex(std::cos(th), std::sin(th));
      Complex dq = r * Complex(-std::sin(th), std::cos(th)) * (2 * M_PI / nodes);
      acc += inner_residue(q, r / 3.0, p) * dq;
    }
    return acc / Complex(0.0, 2 * M_PI);
  }

  // Res_{p' -> q} of dS_{q,p'}(p) B(q,p') / ((y(q)-y(p'))(x(q)-x(p')))
  Complex inner_residue(Complex q, double rho, Complex p, int nodes = 64) const {
    Complex acc(0.0, 0.0);
    Complex yq = c_->y(q), xq = c_->x(q);
    for (int k = 0; k < nodes; ++k) {
      double th = 2 * M_PI * k / nodes;
      Complex pp = q + rho * Complex(std::cos(th), std::sin(th));
      Complex dpp = rho * Complex(-std::sin(th), std::cos(th)) *
                    (2 * M_PI / nodes);
      Complex ds = 1.0 / (p - q) - 1.0 / (p - pp);
      Complex b = 1.0 / ((q - pp) * (q - pp));
      Complex den = (yq - c_->y(pp)) * (xq - c_->x(pp));
      acc += ds * b / den * dpp;
    }
    return acc / Complex(0.0, 2 * M_PI);
  }

  const RationalSpectralCurve* c_;
  std::vector<double> radii_;
};

// branch data of the genus-0 curve: images, local derivatives in the
// coordinate zeta_i = sqrt(x - x(e_i)) and the projective-connection values
struct CurveModuli {
  int genus = 0;
  std::vector<Complex> e;        // zeros of dx
  std::vector<Complex> x_of_e;
  std::vector<Complex> dy_dzeta;       // y'(e_i) in the local coordinate
  std::vector<Complex> schwarz_zeta;   // S_{zeta_i}(e_i)
};

inline CurveModuli curve_moduli(const RationalSpectralCurve& c) {
  CurveModuli out;
  out.e = c.branch_x;
  for (const Complex& e : c.branch_x) {
    out.x_of_e.push_back(c.x(e));
    // x - x(e) = c2 w^2 + c3 w^3 + c4 w^4 + ..., w = z - e
    auto der = [&](int k) {
      // k-th derivative of x at e over k!
      if (k == 2) return Complex(c.ddx(e.real()), 0.0) / 2.0;
      if (k == 3) return Complex(c.dddx(e.real()), 0.0) / 6.0;
      // fourth derivative
      double acc = 0.0;
      for (int j = 1; j <= c.d2; ++j)
        acc += j * (j + 1) * (j + 2) * (j + 3) * c.a[j] *
               std::pow(e.real(), -j - 4);
      return Complex(acc, 0.0) / 24.0;
    };
    Complex c2 = der(2), c3 = der(3), c4 = der(4);
    if (std::abs(c2) < 1e-12)
      throw DegenerateBranchPoint("x''(e) vanishes at a branch point");
    Complex zp = sqrt(c2);  // zeta'(e)
    out.dy_dzeta.push_back(Complex(c.dy(e.real()), 0.0) / zp);
    Complex r1 = c3 / c2, r2 = c4 / c2;
    // schwarzian of zeta(z) at e: S = 3 r2 - (9/4) r1^2, then the
    // projective connection in the zeta frame is -S / zeta'(e)^2
    Complex s = 3.0 * r2 - 2.25 * r1 * r1;
    out.schwarz_zeta.push_back(-s / c2);
  }
  return out;
}

// pointwise E(x,y) = -g~_{d2+1} prod_i (y - y(z_i(x))) and its coefficient
// table on the claimed degrees (d1+1, d2+1)
inline double loop_curve_E(const RationalSpectralCurve& c, double x, double y) {
  std::vector<Complex> zs = all_z_of_x(c, Complex(x, 0.0));
  Complex acc(-c.model.v2.leading(), 0.0);
  for (const Complex& z : zs) acc *= (Complex(y, 0.0) - c.y(z));
  return acc.real();
}

inline MatrixXd loop_curve_E_table(const RationalSpectralCurve& c) {
  const int nx = c.d1 + 3, ny = c.d2 + 3;
  MatrixXd V(nx, ny);
  std::vector<double> xs(nx), ys(ny);
  for (int i = 0; i < nx; ++i) xs[i] = 2.0 * std::cos(M_PI * (i + 0.5) / nx);
  for (int j = 0; j < ny; ++j) ys[j] = 2.0 * std::cos(M_PI * (j + 0.5) / ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) V(i, j) = loop_curve_E(c, xs[i], ys[j]);
  MatrixXd Vy(ny, c.d2 + 2), Vx(nx, c.d1 + 2);
  for (int j = 0; j < ny; ++j) {
    double p = 1.0;
    for (int k = 0; k <= c.d2 + 1; ++k) { Vy(j, k) = p; p *= ys[j]; }
  }
  for (int i = 0; i < nx; ++i) {
    double p = 1.0;
    for (int k = 0; k <= c.d1 + 1; ++k) { Vx(i, k) = p; p *= xs[i]; }
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qy(Vy), qx(Vx);
  MatrixXd cy(nx, c.d2 + 2);
  for (int i = 0; i < nx; ++i)
    cy.row(i) = qy.solve(V.row(i).transpose()).transpose();
  MatrixXd out(c.d1 + 2, c.d2 + 2);
  for (int j = 0; j <= c.d2 + 1; ++j) out.col(j) = qx.solve(cy.col(j));
  return out;
}

// equilibrium density rho(x) = |Im Y(x)| / (pi T) on the cut
inline double equilibrium_density(const RationalSpectralCurve& c, double x) {
  std::vector<Complex> roots = all_z_of_x(c, Complex(x, 0.0));
  double best = 0.0;
  bool complex_pair = false;
  for (const Complex& z : roots) {
    if (std::abs(z.imag()) > 1e-9 * (1.0 + std::abs(z.real()))) {
      complex_pair = true;
      best = std::max(best, std::abs(c.y(z).imag()));
    }
  }
  if (!complex_pair) throw OutsideCut("x lies outside the eigenvalue support");
  return best / (M_PI * c.T);
}

}  // namespace bimatrix
