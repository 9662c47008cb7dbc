#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "bimatrix/group_integrals.hpp"
#include "bimatrix/oracles.hpp"

using namespace bimatrix;

TEST_CASE("haar samples are unitary and column-balanced") {
  Rng rng(11);
  for (int N : {2, 3, 6}) {
    Eigen::MatrixXcd u = haar_sample(N, rng);
    Eigen::MatrixXcd diff =
        u.adjoint() * u - Eigen::MatrixXcd::Identity(N, N);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
  }
  // <|U_00|^2> = 1/N within 3 sigma; |U_00|^2 ~ Beta(1, N-1)
  const int N = 3;
  const long n = 100000;
  Rng rng2(5);
  double acc = 0.0;
  for (long i = 0; i < n; ++i) acc += std::norm(haar_sample(N, rng2)(0, 0));
  double mean = acc / n;
  double var = (N - 1.0) / (N * N * (N + 1.0));
  CHECK(std::abs(mean - 1.0 / N) < 3.0 * std::sqrt(var / n));
}

TEST_CASE("haar distribution invariant under fixed left multiplication") {
  const int N = 3, n = 4000;
  Rng rng(21);
  Eigen::MatrixXcd V = haar_sample(N, rng);
  std::vector<double> s1, s2;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXcd u = haar_sample(N, rng);
    s1.push_back(std::norm(u(0, 0)));
    s2.push_back(std::norm((V * u)(0, 0)));
  }
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  // two-sample Kolmogorov-Smirnov at alpha = 0.01
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < s1.size() && j < s2.size()) {
    if (s1[i] <= s2[j]) ++i;
    else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n -
                             static_cast<double>(j) / n));
  }
  CHECK(d < 1.628 * std::sqrt(2.0 / n));
}

TEST_CASE("hciz: N = 2 exact value and 3-sigma MC agreement") {
  // tr A U B U+ = c + d p with p = |U_00|^2 uniform on [0,1]:
  // E = (e^{c+d} - e^c)/d; for a = b = (1,-1): (e^2 - e^-2)/4
  DiagonalPair pair{(VectorXd(2) << 1, -1).finished(),
                    (VectorXd(2) << 1, -1).finished()};
  auto res = hciz_value(pair, 1000000, 3);
  double exact = (std::exp(2.0) - std::exp(-2.0)) / 4.0;
  CHECK(std::abs(res.mc.mean - exact) < 3.0 * res.mc.err);
  CHECK(res.det_ratio == doctest::Approx(exact).epsilon(1e-12));
  // symmetry of det(e^{a_i b_j}) under scaling a -> t a vs b -> t b
  DiagonalPair p1{(VectorXd(2) << 0.6, -0.9).finished(),
                  (VectorXd(2) << 0.4, 1.1).finished()};
  DiagonalPair p2 = p1;
  p1.a *= 1.7;
  p2.b *= 1.7;
  CHECK(hciz_value(p1, 1000, 1).det_ratio ==
        doctest::Approx(hciz_value(p2, 1000, 1).det_ratio).epsilon(1e-12));
}

TEST_CASE("hciz empirical constant is spectrum-independent") {
  for (int N : {2, 3}) {
    Rng gen(100 + N);
    std::vector<HcizResult> results;
    for (int rep = 0; rep < 5; ++rep) {
      DiagonalPair pair;
      pair.a.resize(N);
      pair.b.resize(N);
      // well-separated spectra in [-1.2, 1.2]
      for (int i = 0; i < N; ++i) {
        pair.a[i] = -1.2 + 2.4 * (i + 0.3 + 0.4 * gen.uniform()) / N;
        pair.b[i] = -1.2 + 2.4 * (i + 0.3 + 0.4 * gen.uniform()) / N;
      }
      results.push_back(hciz_value(pair, 400000, 17 + rep));
    }
    for (size_t i = 1; i < results.size(); ++i) {
      double sigma = std::hypot(results[i].ratio_err, results[0].ratio_err);
      CHECK(std::abs(results[i].ratio - results[0].ratio) < 3.0 * sigma);
    }
  }
}

TEST_CASE("hciz rejects near-degenerate spectra") {
  DiagonalPair pair{(VectorXd(2) << 0.5, 0.5 + 1e-10).finished(),
                    (VectorXd(2) << 1, -1).finished()};
  CHECK_THROWS_AS(hciz_value(pair, 100, 1), NearDegenerateSpectrum);
}

TEST_CASE("morozov: N = 1 closed form and large-x expansion") {
  DiagonalPair pair{(VectorXd(1) << 0.3).finished(),
                    (VectorXd(1) << -0.2).finished()};
  auto res = morozov_generating(pair, 2.0, 3.0, 1000, 2);
  double exact = 1.0 / ((2.0 - 0.3) * (3.0 + 0.2));
  CHECK(res.formula == doctest::Approx(exact).epsilon(1e-12));
  CHECK(res.mc.mean == doctest::Approx(exact).epsilon(1e-12));

  // x -> infinity: x * formula -> tr (y - B)^-1
  DiagonalPair p2{(VectorXd(2) << 1, -1).finished(),
                  (VectorXd(2) << 0.7, -0.4).finished()};
  double x = 1e8, y = 4.0;
  auto far = morozov_generating(p2, x, y, 100, 2);
  double lead = 1.0 / (y - 0.7) + 1.0 / (y + 0.4);
  CHECK(far.formula * x == doctest::Approx(lead).epsilon(1e-6));
}

TEST_CASE("morozov matches weighted MC at N = 2 and 3") {
  DiagonalPair p2{(VectorXd(2) << 1, -1).finished(),
                  (VectorXd(2) << 1, -1).finished()};
  auto r2 = morozov_generating(p2, 3.0, 4.0, 1000000, 9);
  CHECK(std::abs(r2.formula - r2.mc.mean) < 3.0 * r2.mc.err);

  DiagonalPair p3{(VectorXd(3) << 0.9, 0.1, -0.8).finished(),
                  (VectorXd(3) << 1.0, -0.2, -1.1).finished()};
  auto r3 = morozov_generating(p3, 2.5, 2.8, 1000000, 13);
  CHECK(std::abs(r3.formula - r3.mc.mean) < 3.0 * r3.mc.err);
}

TEST_CASE("morozov guards") {
  DiagonalPair p{(VectorXd(2) << 1, -1).finished(),
                 (VectorXd(2) << 0.5, -0.5).finished()};
  CHECK_THROWS_AS(morozov_generating(p, 1.0, 3.0, 100, 1), SingularShift);
}

TEST_CASE("mixed resolvent matches the N = 1 quadrature oracle") {
  ValidatedModel vm = validate_model(gaussian_model(1));
  auto fam = orthogonalize(bimoment_matrix<Quad>(vm, 16));
  auto [Q, P] = build_Q_P(fam, vm);
  for (auto [x, y] : std::vector<std::pair<double, double>>{
           {7.0, 7.0}, {7.0, 8.0}, {8.0, 7.0}, {7.5, 6.8}, {8.0, 8.0}}) {
    auto res = mixed_resolvent_finite(Q, P, vm, 1, Quad(x), Quad(y), 10, 14);
    double oracle = mixed_resolvent_oracle_n1(vm, x, y);
    CHECK(res.value == doctest::Approx(oracle).epsilon(1e-5));
    CHECK(res.certificate < 1e-8);
  }
}

TEST_CASE("mixed resolvent x,y symmetry for the symmetric model") {
  ValidatedModel vm = validate_model(gaussian_model(2));
  auto fam = orthogonalize(bimoment_matrix<Quad>(vm, 18));
  auto [Q, P] = build_Q_P(fam, vm);
  auto a = mixed_resolvent_finite(Q, P, vm, 2, Quad(5.0), Quad(6.0), 12, 16);
  auto b = mixed_resolvent_finite(P, Q, vm, 2, Quad(6.0), Quad(5.0), 12, 16);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10));
}

TEST_CASE("mixed resolvent leading term is N/(x y)") {
  // 1 - det = <tr (x-M1)^-1 (y-M2)^-1> whose k = l = 0 term is N/(xy)
  ValidatedModel vm = validate_model(gaussian_model(2));
  auto fam = orthogonalize(bimoment_matrix<Quad>(vm, 18));
  auto [Q, P] = build_Q_P(fam, vm);
  double x = 3e3, y = 4e3;
  auto res = mixed_resolvent_finite(Q, P, vm, 2, Quad(x), Quad(y), 12, 16);
  CHECK(res.value * x * y == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("mixed resolvent N = 1 identity holds at any temperature") {
  for (double T : {0.7, 1.5}) {
    ValidatedModel vm = validate_model(gaussian_model(1, T));
    auto fam = orthogonalize(bimoment_matrix<Quad>(vm, 16));
    auto [Q, P] = build_Q_P(fam, vm);
    auto res = mixed_resolvent_finite(Q, P, vm, 1, Quad(8.0), Quad(8.5), 10, 14);
    CHECK(res.value ==
          doctest::Approx(mixed_resolvent_oracle_n1(vm, 8.0, 8.5)).epsilon(1e-8));
  }
}
