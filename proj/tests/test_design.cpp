#include <doctest.h>

#include "oracles.hpp"
#include "sir/design.hpp"

using namespace sir;

TEST_CASE("collapse_beta with unit weights sums the off-diagonal cells") {
  // p=1, all w = 1, n=2: X~ is the scalar x_12 + x_21 for every (i,j)
  auto f = oracle::random_fixture(2, 3, 1, 1, 42);
  for (auto& c : f.Ws.cols) std::fill(c.data().begin(), c.data().end(), 1.0);
  f.Wr = f.Ws;
  VectorXd beta1 = VectorXd::Ones(1);
  auto v = collapse_beta(f.x, f.Ws, f.Wr, beta1);
  for (int m = 0; m < f.x.Tm; ++m) {
    const double expected = f.x.values.at(0, 1, m) + f.x.values.at(1, 0, m);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(v[0].at(i, j, m) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("collapse is linear in the coefficient vector") {
  auto f = oracle::random_fixture(4, 4, 1, 2, 7);
  std::mt19937_64 rng(8);
  VectorXd beta = oracle::random_vec(2, rng);

  auto v0 = collapse_beta(f.x, f.Ws, f.Wr, VectorXd::Zero(2));
  for (const auto& cube : v0)
    for (double x : cube.data()) CHECK(x == 0.0);

  auto v1 = collapse_beta(f.x, f.Ws, f.Wr, beta);
  auto v3 = collapse_beta(f.x, f.Ws, f.Wr, (3.0 * beta).eval());
  for (int k = 0; k < 2; ++k)
    for (size_t i = 0; i < v1[k].data().size(); ++i)
      CHECK(v3[k].data()[i] ==
            doctest::Approx(3.0 * v1[k].data()[i]).epsilon(1e-12));

  auto u0 = collapse_alpha(f.x, f.Ws, f.Wr, VectorXd::Zero(2));
  for (const auto& cube : u0)
    for (double x : cube.data()) CHECK(x == 0.0);
}

TEST_CASE("factorized collapse matches the brute-force pair sum") {
  for (unsigned seed : {1u, 2u, 3u}) {
    auto f = oracle::random_fixture(3, 3, 1, 2, seed);
    std::mt19937_64 rng(seed + 100);
    VectorXd beta = oracle::random_vec(2, rng);
    VectorXd alpha = oracle::random_vec(2, rng);

    auto v = collapse_beta(f.x, f.Ws, f.Wr, beta);
    auto u = collapse_alpha(f.x, f.Ws, f.Wr, alpha);
    for (int m = 0; m < f.x.Tm; ++m)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          VectorXd vb = oracle::collapse_beta(f.x, f.Ws, f.Wr, beta, i, j, m);
          VectorXd ua = oracle::collapse_alpha(f.x, f.Ws, f.Wr, alpha, i, j, m);
          for (int k = 0; k < 2; ++k) {
            CHECK(v[k].at(i, j, m) == doctest::Approx(vb[k]).epsilon(1e-12));
            CHECK(u[k].at(i, j, m) == doctest::Approx(ua[k]).epsilon(1e-12));
          }
          MatrixXd full = collapse_full(f.x, f.Ws, f.Wr, i, j, m);
          MatrixXd brute = oracle::collapse_full(f.x, f.Ws, f.Wr, i, j, m);
          CHECK((full - brute).cwiseAbs().maxCoeff() < 1e-12);
        }
  }
}

TEST_CASE("transpose symmetry under shared designs and symmetric predictors") {
  auto f = oracle::random_fixture(4, 3, 1, 2, 17);
  // symmetrize the predictor
  for (int m = 0; m < f.x.Tm; ++m)
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        f.x.values.at(j, i, m) = f.x.values.at(i, j, m);
  std::mt19937_64 rng(18);
  VectorXd coef = oracle::random_vec(2, rng);
  auto v = collapse_beta(f.x, f.Ws, f.Wr, coef);
  auto u = collapse_alpha(f.x, f.Ws, f.Wr, coef);
  for (int m = 0; m < f.x.Tm; ++m)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 2; ++k)
          CHECK(u[k].at(i, j, m) ==
                doctest::Approx(v[k].at(j, i, m)).epsilon(1e-10));
}

TEST_CASE("collapse_full consistency cases") {
  SUBCASE("zero predictor gives the zero matrix") {
    auto f = oracle::random_fixture(3, 3, 1, 2, 5);
    std::fill(f.x.values.data().begin(), f.x.values.data().end(), 0.0);
    MatrixXd full = collapse_full(f.x, f.Ws, f.Wr, 1, 2, 0);
    CHECK(full.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("p=1 equals collapse_beta with beta=1") {
    auto f = oracle::random_fixture(3, 3, 1, 1, 6);
    auto v = collapse_beta(f.x, f.Ws, f.Wr, VectorXd::Ones(1));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        MatrixXd full = collapse_full(f.x, f.Ws, f.Wr, i, j, 1);
        CHECK(full(0, 0) == doctest::Approx(v[0].at(i, j, 1)).epsilon(1e-12));
      }
  }
}

TEST_CASE("three routes to alpha' X~ beta agree") {
  // oracle equivalence over n <= 5, p <= 3
  for (int n : {3, 5})
    for (int p : {1, 2, 3}) {
      auto f = oracle::random_fixture(n, 3, 1, p,
                                      static_cast<unsigned>(n * 10 + p));
      std::mt19937_64 rng(n * 100 + p);
      VectorXd alpha = oracle::random_vec(p, rng);
      VectorXd beta = oracle::random_vec(p, rng);
      auto v = collapse_beta(f.x, f.Ws, f.Wr, beta);
      auto u = collapse_alpha(f.x, f.Ws, f.Wr, alpha);
      for (int m = 0; m < f.x.Tm; ++m)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const MatrixXd full = collapse_full(f.x, f.Ws, f.Wr, i, j, m);
            const double via_full = alpha.dot(full * beta);
            double via_v = 0.0, via_u = 0.0;
            for (int k = 0; k < p; ++k) {
              via_v += alpha[k] * v[k].at(i, j, m);
              via_u += beta[k] * u[k].at(i, j, m);
            }
            CHECK(via_v == doctest::Approx(via_full).epsilon(1e-10));
            CHECK(via_u == doctest::Approx(via_full).epsilon(1e-10));
          }
    }
}

TEST_CASE("influence_scores") {
  auto f = oracle::random_fixture(4, 3, 1, 3, 77);
  SUBCASE("zero coefficients give the zero matrix") {
    MatrixXd s = influence_scores(f.Ws, VectorXd::Zero(3), 0);
    CHECK(s.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("constant design gives a constant matrix") {
    for (auto& c : f.Ws.cols) std::fill(c.data().begin(), c.data().end(), 1.0);
    VectorXd coef(3);
    coef << 2.5, 0.0, 0.0;
    f.Ws.p = 1;
    f.Ws.cols.resize(1);
    f.Ws.names.resize(1);
    MatrixXd s = influence_scores(f.Ws, coef.head(1), 1);
    CHECK((s.array() == 2.5).all());
  }
  SUBCASE("entries are per-pair dot products") {
    std::mt19937_64 rng(78);
    VectorXd coef = oracle::random_vec(3, rng);
    MatrixXd s = influence_scores(f.Ws, coef, 1);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double dot = 0.0;
        for (int k = 0; k < 3; ++k) dot += coef[k] * f.Ws.cols[k].at(i, j, 1);
        CHECK(s(i, j) == dot);
      }
  }
  SUBCASE("period out of range") {
    CHECK_THROWS_AS(influence_scores(f.Ws, VectorXd::Zero(3), 9), SirError);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  auto f = oracle::random_fixture(3, 3, 1, 2, 91);
  CHECK_THROWS_AS(collapse_beta(f.x, f.Ws, f.Wr, VectorXd::Zero(3)), SirError);
  VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(collapse_beta(f.x, f.Ws, f.Wr, bad), SirError);
}
