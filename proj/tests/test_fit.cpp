#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sir/fit.hpp"
#include "sir/glm.hpp"
#include "sir/inference.hpp"
#include "sir/sim.hpp"

using namespace sir;

namespace {

ParameterSet default_truth() {
  ParameterSet t;
  t.theta = Eigen::Vector2d(-0.3, 0.4);
  t.alpha = Eigen::Vector2d(1.0, 0.5);
  t.beta = Eigen::Vector2d(0.4, 0.3);
  return t;
}

} // namespace

TEST_CASE("canonicalize") {
  SUBCASE("positive scale") {
    ParameterSet p;
    p.theta = VectorXd::Zero(1);
    p.alpha = Eigen::Vector2d(2.0, 4.0);
    p.beta = Eigen::Vector2d(1.0, 1.0);
    ParameterSet c = canonicalize(p);
    CHECK(c.alpha[0] == doctest::Approx(1.0));
    CHECK(c.alpha[1] == doctest::Approx(2.0));
    CHECK(c.beta[0] == doctest::Approx(2.0));
    CHECK(c.beta[1] == doctest::Approx(2.0));
  }
  SUBCASE("idempotent on canonical input") {
    ParameterSet p;
    p.theta = Eigen::Vector2d(0.5, -0.5);
    p.alpha = Eigen::Vector2d(1.0, 3.0);
    p.beta = Eigen::Vector2d(-1.0, 2.0);
    ParameterSet c = canonicalize(p);
    CHECK((c.alpha - p.alpha).cwiseAbs().maxCoeff() == 0.0);
    CHECK((c.beta - p.beta).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("negative scale flips both vectors") {
    ParameterSet p;
    p.theta = VectorXd::Zero(1);
    p.alpha = Eigen::Vector2d(-0.5, 1.0);
    p.beta = Eigen::Vector2d(2.0, 0.0);
    ParameterSet c = canonicalize(p);
    CHECK(c.alpha[0] == doctest::Approx(1.0));
    CHECK(c.alpha[1] == doctest::Approx(-2.0));
    CHECK(c.beta[0] == doctest::Approx(-1.0));
    CHECK(c.beta[1] == doctest::Approx(0.0));
  }
  SUBCASE("vanishing alpha_1 is a hard error") {
    ParameterSet p;
    p.theta = VectorXd::Zero(1);
    p.alpha = Eigen::Vector2d(1e-9, 1.0);
    p.beta = Eigen::Vector2d(1.0, 1.0);
    try {
      canonicalize(p);
      FAIL("expected non-identifiable error");
    } catch (const SirError& e) {
      CHECK(e.code() == ErrorCode::non_identifiable);
      CHECK(std::string(e.what()).find("Reorder") != std::string::npos);
    }
  }
}

TEST_CASE("predict_mu closed forms") {
  auto f = oracle::random_fixture(4, 4, 2, 2, 3);
  SUBCASE("all-zero parameters give unit rates") {
    ParameterSet p;
    p.theta = VectorXd::Zero(2);
    p.alpha = VectorXd::Zero(2);
    p.beta = VectorXd::Zero(2);
    Cube mu = predict_mu(p, f.Z, f.Ws, f.Wr, f.x);
    for (int m = 0; m < f.x.Tm; ++m)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (i != j) CHECK(mu.at(i, j, m) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("intercept-only with null influence gives exp(c)") {
    ParameterSet p;
    p.theta = Eigen::Vector2d(0.7, 0.0);
    p.alpha = VectorXd::Zero(2);
    p.beta = VectorXd::Zero(2);
    Cube mu = predict_mu(p, f.Z, f.Ws, f.Wr, f.x);
    for (int m = 0; m < f.x.Tm; ++m)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (i != j)
            CHECK(mu.at(i, j, m) == doctest::Approx(std::exp(0.7)).epsilon(1e-12));
  }
  SUBCASE("matches the brute-force bilinear sum") {
    std::mt19937_64 rng(19);
    ParameterSet p;
    p.theta = oracle::random_vec(2, rng, 0.2);
    p.alpha = oracle::random_vec(2, rng, 0.3);
    p.beta = oracle::random_vec(2, rng, 0.3);
    Cube mu = predict_mu(p, f.Z, f.Ws, f.Wr, f.x);
    for (int m = 0; m < f.x.Tm; ++m)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          if (i == j) continue;
          const double eta = oracle::eta_cell(p, f.Z, f.Ws, f.Wr, f.x, i, j, m);
          CHECK(mu.at(i, j, m) == doctest::Approx(std::exp(eta)).epsilon(1e-10));
        }
  }
}

TEST_CASE("predict_mu skips masked periods") {
  auto f = oracle::random_fixture(4, 5, 2, 2, 61);
  std::mt19937_64 rng(62);
  ParameterSet p;
  p.theta = oracle::random_vec(2, rng, 0.2);
  p.alpha = oracle::random_vec(2, rng, 0.3);
  p.beta = oracle::random_vec(2, rng, 0.3);
  Cube full = predict_mu(p, f.Z, f.Ws, f.Wr, f.x);
  Cube masked = predict_mu(p, f.Z, f.Ws, f.Wr, f.x, {1});
  for (int m = 0; m < f.x.Tm; ++m)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        if (m == 1)
          CHECK(std::isnan(masked.at(i, j, m)));
        else
          CHECK(masked.at(i, j, m) == full.at(i, j, m));
      }
}

TEST_CASE("predict_mu is invariant under the (alpha/c, c beta) rescaling") {
  auto f = oracle::random_fixture(5, 4, 2, 2, 21);
  std::mt19937_64 rng(22);
  ParameterSet p;
  p.theta = oracle::random_vec(2, rng, 0.2);
  p.alpha = oracle::random_vec(2, rng, 0.4);
  p.beta = oracle::random_vec(2, rng, 0.4);
  Cube base = predict_mu(p, f.Z, f.Ws, f.Wr, f.x);
  for (double c : {-2.0, 0.1, 10.0}) {
    ParameterSet scaled;
    scaled.theta = p.theta;
    scaled.alpha = p.alpha / c;
    scaled.beta = p.beta * c;
    Cube mu = predict_mu(scaled, f.Z, f.Ws, f.Wr, f.x);
    for (int m = 0; m < f.x.Tm; ++m)
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          if (i == j) continue;
          CHECK(mu.at(i, j, m) ==
                doctest::Approx(base.at(i, j, m)).epsilon(1e-12));
        }
  }
}

TEST_CASE("alternating fit recovers simulated parameters within 3 SEs") {
  ParameterSet truth = default_truth();
  SimConfig cfg = SimConfig::basic(10, 60, 101, truth);
  SimResult sim = simulate(cfg);
  SirOptions opts;
  opts.tol = 1e-10;
  SirFit fit = fit_sir(sim.y, sim.Z, sim.Ws, sim.Wr, opts);
  CHECK(fit.converged);

  SirData data{&sim.y, &sim.Z, &sim.Ws, &sim.Wr, {}};
  VcovResult vcov = compute_vcov(fit, data);
  VectorXd psi_hat = oracle::pack_psi(fit.params);
  VectorXd psi_true = oracle::pack_psi(truth);
  for (long k = 0; k < psi_hat.size(); ++k)
    CHECK(std::abs(psi_hat[k] - psi_true[k]) < 3.0 * vcov.se_sandwich[k]);
}

TEST_CASE("log-likelihood trace never decreases") {
  ParameterSet truth = default_truth();
  SimConfig cfg = SimConfig::basic(8, 40, 55, truth);
  SimResult sim = simulate(cfg);
  SirFit fit = fit_sir(sim.y, sim.Z, sim.Ws, sim.Wr);
  REQUIRE(fit.loglik_trace.size() >= 2);
  for (size_t k = 1; k < fit.loglik_trace.size(); ++k)
    CHECK(fit.loglik_trace[k] >=
          fit.loglik_trace[k - 1] -
              1e-9 * (1.0 + std::abs(fit.loglik_trace[k - 1])));
}

TEST_CASE("rescaled initialization lands on the same canonical estimates") {
  ParameterSet truth = default_truth();
  SimConfig cfg = SimConfig::basic(8, 60, 77, truth);
  SimResult sim = simulate(cfg);
  SirOptions opts;
  opts.tol = 1e-12;
  opts.beta0 = Eigen::Vector2d(0.5, 0.5);
  SirFit a = fit_sir(sim.y, sim.Z, sim.Ws, sim.Wr, opts);
  opts.beta0 = Eigen::Vector2d(5.0, 5.0); // 10x
  SirFit b = fit_sir(sim.y, sim.Z, sim.Ws, sim.Wr, opts);
  CHECK((a.params.theta - b.params.theta).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((a.params.alpha - b.params.alpha).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((a.params.beta - b.params.beta).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("multi-start agrees on well-conditioned data and reports spread") {
  ParameterSet truth = default_truth();
  SimConfig cfg = SimConfig::basic(8, 80, 31, truth);
  SimResult sim = simulate(cfg);
  SirOptions opts;
  opts.tol = 1e-12;
  opts.multi_start = 3;
  opts.seed = 9;
  SirFit fit = fit_sir(sim.y, sim.Z, sim.Ws, sim.Wr, opts);
  CHECK(fit.multistart.starts == 4);
  CHECK(fit.multistart.max_param_spread < 1e-6);
  CHECK_FALSE(fit.multistart.disagreement);
}

TEST_CASE("no true influence: fitted rates track the plain GLM oracle") {
  // With beta = 0 in truth the bilinear term is absent; the SIR fit spends
  // 2p extra parameters on noise, so its linear predictor drifts from the
  // GLM's by O(1/sqrt(N)), shrinking as T grows.
  ParameterSet truth;
  truth.theta = Eigen::Vector2d(0.2, 0.5);
  truth.alpha = Eigen::Vector2d(1.0, 0.3);
  truth.beta = Eigen::Vector2d(0.0, 0.0);
  double prev_dev = std::numeric_limits<double>::infinity();
  for (int T : {60, 500}) {
    SimConfig cfg = SimConfig::basic(10, T, 3, truth);
    SimResult sim = simulate(cfg);
    SirOptions opts;
    opts.tol = 1e-10;
    SirFit fit = fit_sir(sim.y, sim.Z, sim.Ws, sim.Wr, opts);

    auto [index, resp] = flatten(sim.y);
    MatrixXd Zmat = flatten_design(sim.Z, index);
    GlmFit glm = fit_poisson(Zmat, resp);
    PredictorTensor x = lag_log_transform(sim.y);
    Cube mu = predict_mu(fit.params, sim.Z, sim.Ws, sim.Wr, x);
    double maxdev = 0.0;
    for (long r = 0; r < index.rows(); ++r) {
      int i, j, m;
      index.decode(r, i, j, m);
      const double eta_glm = Zmat.row(r) * glm.coefficients;
      maxdev = std::max(maxdev, std::abs(std::log(mu.at(i, j, m)) - eta_glm));
    }
    CHECK(maxdev < 0.15);
    CHECK(maxdev < prev_dev);
    prev_dev = maxdev;
  }
}

TEST_CASE("too few observations after masking") {
  auto f = oracle::random_fixture(2, 3, 2, 2, 1);
  PeriodMask mask = {0};
  // 2 observations left, need q + p + 1 = 5
  CHECK_THROWS_AS(fit_sir(f.y, f.Z, f.Ws, f.Wr, {}, mask), SirError);
}
