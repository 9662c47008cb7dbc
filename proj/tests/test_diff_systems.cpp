#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bimatrix/cd_kernels.hpp"
#include "bimatrix/diff_systems.hpp"

using namespace bimatrix;

namespace {
struct Setup {
  ValidatedModel vm;
  BiorthogonalFamily<Quad> fam;
  BandOperator<Quad> Q, P;
};

Setup make(const ModelSpec& spec, int M) {
  Setup s{validate_model(spec), {}, {}, {}};
  s.fam = orthogonalize(bimoment_matrix<Quad>(s.vm, M));
  auto qp = build_Q_P(s.fam, s.vm);
  s.Q = qp.first;
  s.P = qp.second;
  return s;
}

// model with quartic V2: d1 = 1, d2 = 3
ModelSpec quartic_y_model(int N, double t) {
  ModelSpec m;
  m.v1 = Potential({0.0, 2.0});
  m.v2 = Potential({0.0, 2.0, 0.0, t});
  m.N = N;
  return m;
}
}  // namespace

TEST_CASE("folding rows: window is the identity, off-window via recurrence") {
  Setup s = make(gaussian_model(2), 16);
  const int n = 5;
  Quad x(0.7);
  Quad g_lead(s.vm.spec.v2.leading());
  auto F = folding_rows(s.Q, g_lead, n, x, n - 2, n + 3);
  auto Frec = folding_rows_recurrence(s.Q, n, x, n - 2, n + 3);
  CHECK(to_double((F - Frec).cwiseAbs().maxCoeff()) < 1e-10);
  // window rows are unit rows
  for (int m = n - 1; m <= n; ++m)
    for (int j = 0; j <= 1; ++j) {
      double want = (m - (n - 1) == j) ? 1.0 : 0.0;
      CHECK(to_double(F(m - (n - 2), j)) == doctest::Approx(want).epsilon(1e-12));
    }
  // m = n + 1 row solves the three-term recurrence upward
  CHECK(to_double(F(n + 1 - (n - 2), 1)) ==
        doctest::Approx(to_double((x - s.Q.m(n, n)) / s.Q.gamma[n])).epsilon(1e-12));
}

TEST_CASE("folding reproduces the wave function off the window") {
  Setup s = make(gaussian_model(2), 16);
  WaveEvaluator<Quad> w{&s.fam, &s.vm};
  const int n = 5;
  double x = 0.7;
  Quad g_lead(s.vm.spec.v2.leading());
  auto F = folding_rows(s.Q, g_lead, n, Quad(x), n - 4, n + 3);
  for (int m : {n - 4, n - 3, n + 2, n + 3}) {
    double folded = 0.0;
    for (int j = 0; j <= 1; ++j)
      folded += to_double(F(m - (n - 4), j)) * w.psi(n - 1 + j, x);
    CHECK(folded == doctest::Approx(w.psi(m, x)).epsilon(1e-8));
  }
}

TEST_CASE("folding for the wide-band quartic model") {
  Setup s = make(quartic_model(4, 0.08), 20);
  // P has band d1 = 3: fold the y-side (roles swapped)
  const int n = 7;
  Quad y(0.4);
  Quad g_lead(s.vm.spec.v1.leading());
  auto G = folding_rows(s.P, g_lead, n, y, n - 5, n + 2);
  auto Grec = folding_rows_recurrence(s.P, n, y, n - 5, n + 2);
  CHECK(to_double((G - Grec).cwiseAbs().maxCoeff()) < 1e-9);
}

TEST_CASE("dual folding satisfies the defining property for phi~") {
  Setup s = make(gaussian_model(2), 16);
  const int n = 5;
  double x = 0.9;
  Quad g_lead(s.vm.spec.v2.leading());
  auto F = folding_rows_dual(s.Q, g_lead, n, Quad(x), n - 3, n + 2);
  // window [n-1, n+d2-1] = {4, 5} must fold to itself
  for (int m = n - 1; m <= n; ++m)
    for (int j = 0; j <= 1; ++j) {
      double want = (m - (n - 1) == j) ? 1.0 : 0.0;
      CHECK(to_double(F(m - (n - 3), j)) == doctest::Approx(want).epsilon(1e-10));
    }
  for (int m : {n - 3, n - 2, n + 1, n + 2}) {
    double folded = 0.0;
    for (int j = 0; j <= 1; ++j)
      folded += to_double(F(m - (n - 3), j)) * fourier_wave(s.fam, s.vm, n - 1 + j, x, false);
    double direct = fourier_wave(s.fam, s.vm, m, x, false);
    CHECK(folded == doctest::Approx(direct).epsilon(1e-7));
  }
}

TEST_CASE("two D1 constructions agree and entries are polynomial") {
  Setup s = make(gaussian_model(4), 18);
  BuildReport rep;
  auto D1 = build_D1(s.Q, s.P, s.vm.spec.v1, s.vm.spec.v2, 6, &rep);
  CHECK(rep.constructions_disagreement < 1e-10);
  CHECK(rep.interpolation_residual < 1e-10);
  CHECK(D1.size() == 2);
  CHECK(D1.degree() == 1);

  Setup sq = make(quartic_model(4, 0.05), 20);
  auto D1q = build_D1(sq.Q, sq.P, sq.vm.spec.v1, sq.vm.spec.v2, 8, &rep);
  CHECK(rep.constructions_disagreement < 1e-8);
  CHECK(D1q.degree() == 3);
}

TEST_CASE("differential system acts as the derivative") {
  Setup s = make(quartic_model(4, 0.05), 20);
  const int n = 8;
  auto D1 = build_D1(s.Q, s.P, s.vm.spec.v1, s.vm.spec.v2, n);
  WaveEvaluator<Quad> w{&s.fam, &s.vm};
  double tn = s.vm.spec.T / s.vm.spec.N;
  for (double x : {-1.1, -0.5, 0.2, 0.9, 1.4}) {
    double h = 1e-5;
    // five-point stencil for psi_n'
    double der = (-w.psi(n, x + 2 * h) + 8 * w.psi(n, x + h) -
                  8 * w.psi(n, x - h) + w.psi(n, x - 2 * h)) / (12 * h);
    double lhs = -tn * der;
    Matrix<Quad> Dx = D1.eval(Quad(x));
    double rhs = 0.0;
    for (int j = 0; j <= s.vm.d2; ++j)
      rhs += to_double(Dx(s.vm.d2, j)) * w.psi(n - s.vm.d2 + j, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }
}

TEST_CASE("trace of the dual system") {
  // tr D~_1(x) is the sum of the y-branches of the curve: the y^{d2}
  // coefficient of E gives V1'(x) - g~_{d2}/g~_{d2+1}, plus x/g~_2 when
  // d2 = 1 (the -xy coupling lands on y^{d2} only in that case).
  Setup s = make(gaussian_model(4), 18);
  const int n = 6;
  auto D1t = build_D1_tilde(s.Q, s.P, s.vm.spec.v2, n);
  for (double x : {-0.8, 0.0, 1.2}) {
    double tr = to_double(D1t.eval(Quad(x)).trace());
    // 2x + x/2 for the gaussian model
    CHECK(tr == doctest::Approx(2.5 * x).epsilon(1e-8));
  }
  Setup sq = make(quartic_y_model(3, 0.1), 16);
  auto Dq = build_D1_tilde(sq.Q, sq.P, sq.vm.spec.v2, 7);
  for (double x : {-0.5, 0.7}) {
    double tr = to_double(Dq.eval(Quad(x)).trace());
    double expect = sq.vm.spec.v1.dvalue(x) -
                    sq.vm.spec.v2.g[3] / sq.vm.spec.v2.g[4];
    CHECK(tr == doctest::Approx(expect).epsilon(1e-8));
  }
  // the conjugated system carries the same trace
  auto D1 = build_D1(s.Q, s.P, s.vm.spec.v1, s.vm.spec.v2, n);
  CHECK(to_double(D1.eval(Quad(0.9)).trace()) == doctest::Approx(2.25).epsilon(1e-8));
}

TEST_CASE("spectral duality: A_n conjugates D1 into D1~^t") {
  Setup s = make(gaussian_model(4), 18);
  const int n = 6;
  auto D1 = build_D1(s.Q, s.P, s.vm.spec.v1, s.vm.spec.v2, n);
  auto D1t = build_D1_tilde(s.Q, s.P, s.vm.spec.v2, n);
  auto A = detail::cd_block(s.Q, n);
  CHECK(duality_residual(D1, D1t, A) < 1e-6);

  Setup sq = make(quartic_y_model(3, 0.1), 18);
  const int nq = 8;
  auto D1q = build_D1(sq.Q, sq.P, sq.vm.spec.v1, sq.vm.spec.v2, nq);
  auto D1tq = build_D1_tilde(sq.Q, sq.P, sq.vm.spec.v2, nq);
  auto Aq = detail::cd_block(sq.Q, nq);
  CHECK(duality_residual(D1q, D1tq, Aq) < 1e-5);
}

TEST_CASE("all four characteristic polynomials define the same curve") {
  Setup s = make(quartic_model(4, 0.05), 22);
  const int n = 8;
  const Potential& v1 = s.vm.spec.v1;
  const Potential& v2 = s.vm.spec.v2;
  auto D1 = build_D1(s.Q, s.P, v1, v2, n);
  auto D1t = build_D1_tilde(s.Q, s.P, v2, n);
  auto D2 = build_D1(s.P, s.Q, v2, v1, n);
  auto D2t = build_D1_tilde(s.P, s.Q, v1, n);
  Quad lead2(v2.leading()), lead1(v1.leading());
  auto E1 = spectral_curve_finite_n(D1, lead2, s.vm.d1, s.vm.d2);
  auto E1t = spectral_curve_finite_n(D1t, lead2, s.vm.d1, s.vm.d2);
  auto E2 = spectral_curve_finite_n(D2, lead1, s.vm.d2, s.vm.d1);
  auto E2t = spectral_curve_finite_n(D2t, lead1, s.vm.d2, s.vm.d1);
  double scale = to_double(E1.E.cwiseAbs().maxCoeff());
  CHECK(to_double((E1.E - E1t.E).cwiseAbs().maxCoeff()) / scale < 1e-6);
  CHECK(to_double((E1.E - E2.E.transpose()).cwiseAbs().maxCoeff()) / scale < 1e-6);
  CHECK(to_double((E1.E - E2t.E.transpose()).cwiseAbs().maxCoeff()) / scale < 1e-6);
  // gaussian case: degrees (2, 2)
  Setup sg = make(gaussian_model(4), 16);
  auto Dg = build_D1(sg.Q, sg.P, sg.vm.spec.v1, sg.vm.spec.v2, 6);
  auto Eg = spectral_curve_finite_n(Dg, Quad(2.0), 1, 1);
  CHECK(Eg.deg_x() == 2);
  CHECK(Eg.deg_y() == 2);
  CHECK(std::abs(to_double(Eg.E(2, 2))) < 1e-8 * to_double(Eg.E.cwiseAbs().maxCoeff()));
}

TEST_CASE("wronskian grows like the integrated trace") {
  // propagate (T/N) Phi' = D~_1 Phi by RK4 and compare log det growth with
  // the exact integral of tr D~_1
  Setup s = make(gaussian_model(4), 18);
  const int n = 6;
  auto D1t = build_D1_tilde(s.Q, s.P, s.vm.spec.v2, n);
  double x0 = 0.1, x1 = 0.6;
  int steps = 4000;
  double h = (x1 - x0) / steps;
  double nt = s.vm.spec.N / s.vm.spec.T;
  MatrixXd phi = MatrixXd::Identity(2, 2);
  auto rhs = [&](double x, const MatrixXd& f) {
    Matrix<Quad> d = D1t.eval(Quad(x));
    MatrixXd dd(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) dd(a, b) = to_double(d(a, b));
    return (nt * dd * f).eval();
  };
  for (int i = 0; i < steps; ++i) {
    double x = x0 + i * h;
    MatrixXd k1 = rhs(x, phi);
    MatrixXd k2 = rhs(x + h / 2, phi + h / 2 * k1);
    MatrixXd k3 = rhs(x + h / 2, phi + h / 2 * k2);
    MatrixXd k4 = rhs(x + h, phi + h * k3);
    phi += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  double logdet = std::log(std::abs(phi.determinant()));
  // integral of tr D~_1 = 2.5 x between x0 and x1, times N/T
  double expect = nt * 1.25 * (x1 * x1 - x0 * x0);
  CHECK(logdet == doctest::Approx(expect).epsilon(1e-6));
}
