// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Oracles are brute-force pair sums, closed forms, and simulation.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "oracles.hpp"
#include "sir/eval.hpp"
#include "sir/fit.hpp"
#include "sir/glm.hpp"
#include "sir/inference.hpp"
#include "sir/io.hpp"
#include "sir/scoring.hpp"
#include "sir/sim.hpp"

using namespace sir;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
std::vector<std::vector<double>> g_traces; // every fitted trace in this run

void report(int id, const std::string& name, bool pass, double seconds,
            const std::string& detail) {
  std::printf("[%2d/10] %s %-28s (%6.1fs) %s\n", id, pass ? "PASS" : "FAIL",
              name.c_str(), seconds, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

SirFit fit_tracked(const DyadTensor& y, const DirectDesign& Z,
                   const InfluenceDesign& Ws, const InfluenceDesign& Wr,
                   const SirOptions& opts, const PeriodMask& mask = {}) {
  SirFit fit = fit_sir(y, Z, Ws, Wr, opts, mask);
  g_traces.push_back(fit.loglik_trace);
  return fit;
}

ParameterSet recovery_truth() {
  ParameterSet t;
  t.theta = Eigen::Vector2d(-0.3, 0.4);
  t.alpha = Eigen::Vector2d(1.0, 0.5);
  t.beta = Eigen::Vector2d(0.4, 0.3);
  return t;
}

// --- 1: factorized collapse vs brute-force pair sums, 50 seeded instances ---
void criterion_collapse_oracle() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (unsigned seed = 1; seed <= 50; ++seed) {
    const int n = 2 + static_cast<int>(seed % 4);      // 2..5
    const int p = 1 + static_cast<int>(seed % 3);      // 1..3
    auto f = oracle::random_fixture(n, 4, 1, p, seed);
    std::mt19937_64 rng(seed + 1000);
    const VectorXd beta = oracle::random_vec(p, rng);
    const VectorXd alpha = oracle::random_vec(p, rng);
    const auto v = collapse_beta(f.x, f.Ws, f.Wr, beta);
    const auto u = collapse_alpha(f.x, f.Ws, f.Wr, alpha);
    for (int m = 0; m < f.x.Tm; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const MatrixXd brute = oracle::collapse_full(f.x, f.Ws, f.Wr, i, j, m);
          const VectorXd vb = brute * beta;
          const VectorXd ua = brute.transpose() * alpha;
          const MatrixXd full = collapse_full(f.x, f.Ws, f.Wr, i, j, m);
          worst = std::max(worst, (full - brute).cwiseAbs().maxCoeff());
          for (int k = 0; k < p; ++k) {
            worst = std::max(worst, std::abs(v[k].at(i, j, m) - vb[k]));
            worst = std::max(worst, std::abs(u[k].at(i, j, m) - ua[k]));
          }
        }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << "max |factorized - brute| = " << worst;
  report(1, "collapsed-design oracle", worst < 1e-10 && secs < 10.0, secs, d.str());
}

// --- 2: predict_mu vs the influence-matrix route A X_t B^T, 20 instances ---
void criterion_bilinear_equivalence() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const int n = 3 + static_cast<int>(seed % 3);
    auto f = oracle::random_fixture(n, 4, 2, 2, seed + 500);
    std::mt19937_64 rng(seed + 600);
    ParameterSet params;
    params.theta = oracle::random_vec(2, rng, 0.3);
    params.alpha = oracle::random_vec(2, rng, 0.4);
    params.beta = oracle::random_vec(2, rng, 0.4);
    const Cube mu = predict_mu(params, f.Z, f.Ws, f.Wr, f.x);
    for (int m = 0; m < f.x.Tm; ++m) {
      const MatrixXd A = influence_scores(f.Ws, params.alpha, m);
      const MatrixXd B = influence_scores(f.Wr, params.beta, m);
      const MatrixXd M = A * f.x.values.slice(m) * B.transpose();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          double eta = M(i, j);
          for (int k = 0; k < 2; ++k)
            eta += params.theta[k] * f.Z.cols[k].at(i, j, m);
          worst = std::max(worst, std::abs(mu.at(i, j, m) - std::exp(eta)));
        }
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << "max |collapsed route - A X B^T route| = " << worst;
  report(2, "bilinear equivalence", worst < 1e-10, secs, d.str());
}

// --- 4: rescaling invariance and canonical stability ---
void criterion_identifiability() {
  const auto start = Clock::now();
  SimConfig cfg = SimConfig::basic(8, 50, 77, recovery_truth());
  SimResult sim = simulate(cfg);
  SirOptions opts;
  opts.tol = 1e-10;
  SirFit fit = fit_tracked(sim.y, sim.Z, sim.Ws, sim.Wr, opts);
  const PredictorTensor x = lag_log_transform(sim.y);
  const Cube base = predict_mu(fit.params, sim.Z, sim.Ws, sim.Wr, x);
  double mu_dev = 0.0, canon_dev = 0.0;
  for (double c : {-2.0, 0.1, 10.0}) {
    ParameterSet scaled;
    scaled.theta = fit.params.theta;
    scaled.alpha = fit.params.alpha / c;
    scaled.beta = fit.params.beta * c;
    const Cube mu = predict_mu(scaled, sim.Z, sim.Ws, sim.Wr, x);
    for (int m = 0; m < x.Tm; ++m)
      for (int i = 0; i < sim.y.n; ++i)
        for (int j = 0; j < sim.y.n; ++j) {
          if (i == j) continue;
          mu_dev = std::max(mu_dev, std::abs(mu.at(i, j, m) - base.at(i, j, m)) /
                                        (1.0 + base.at(i, j, m)));
        }
    const ParameterSet canon = canonicalize(scaled);
    canon_dev = std::max(
        canon_dev,
        std::max((canon.alpha - fit.params.alpha).cwiseAbs().maxCoeff(),
                 (canon.beta - fit.params.beta).cwiseAbs().maxCoeff()));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << "mu dev " << mu_dev << ", canonical dev " << canon_dev;
  report(4, "identifiability", mu_dev < 1e-12 && canon_dev < 1e-6, secs, d.str());
}

// --- 5: simulate-then-recover with sandwich intervals, 50 replicates ---
void criterion_recovery() {
  const auto start = Clock::now();
  const ParameterSet truth = recovery_truth();
  const VectorXd psi_true = oracle::pack_psi(truth);
  long cells = 0, within3 = 0, covered = 0;
  int failures = 0;
  for (unsigned rep = 1; rep <= 50; ++rep) {
    SimConfig cfg = SimConfig::basic(10, 200, 9000 + rep, truth);
    SimResult sim = simulate(cfg);
    SirOptions opts;
    opts.tol = 1e-10;
    try {
      SirFit fit = fit_tracked(sim.y, sim.Z, sim.Ws, sim.Wr, opts);
      SirData data{&sim.y, &sim.Z, &sim.Ws, &sim.Wr, {}};
      const VcovResult v = compute_vcov(fit, data);
      const VectorXd psi_hat = oracle::pack_psi(fit.params);
      for (long k = 0; k < psi_hat.size(); ++k) {
        const double err = std::abs(psi_hat[k] - psi_true[k]);
        ++cells;
        if (err < 3.0 * v.se_sandwich[k]) ++within3;
        if (err < 1.959963984540054 * v.se_sandwich[k]) ++covered;
      }
    } catch (const SirError&) {
      ++failures;
      cells += psi_true.size();
    }
  }
  const double frac3 = static_cast<double>(within3) / static_cast<double>(cells);
  const double cover = static_cast<double>(covered) / static_cast<double>(cells);
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << "3-SE fraction " << frac3 << ", coverage " << cover << ", fit failures "
    << failures;
  report(5, "recovery", frac3 >= 0.95 && cover >= 0.90 && cover <= 0.99 &&
                            secs < 300.0,
         secs, d.str());
}

// --- 6: closed-form inference oracles and score finite differences ---
void criterion_inference_oracles() {
  const auto start = Clock::now();
  MatrixXd X = MatrixXd::Ones(3, 1);
  VectorXd y(3);
  y << 1, 2, 3;
  const GlmFit glm = fit_poisson(X, y);
  const VcovResult v = compute_vcov_glm(X, y, glm.coefficients);
  const double hess_err = std::abs(v.vcov_hessian(0, 0) - 1.0 / 6.0);
  const double sand_err = std::abs(v.vcov_sandwich(0, 0) - 2.0 / 36.0);

  SimResult sim = simulate(SimConfig::basic(6, 25, 321, recovery_truth()));
  SirData data{&sim.y, &sim.Z, &sim.Ws, &sim.Wr, {}};
  std::mt19937_64 rng(55);
  double fd_err = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    ParameterSet p;
    p.theta = oracle::random_vec(2, rng, 0.2);
    p.alpha = oracle::random_vec(2, rng, 0.3);
    p.alpha[0] = 1.0;
    p.beta = oracle::random_vec(2, rng, 0.3);
    const auto [score, H] = score_and_hessian(p, data);
    const VectorXd fd = oracle::fd_gradient(
        [&](const VectorXd& v2) {
          return oracle::loglik_psi(v2, sim.y, sim.Z, sim.Ws, sim.Wr);
        },
        oracle::pack_psi(p), 1e-5);
    for (long k = 0; k < fd.size(); ++k)
      fd_err = std::max(fd_err, std::abs(score[k] - fd[k]) /
                                    (1.0 + std::abs(score[k])));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << "closed-form errs " << hess_err << "/" << sand_err << ", score FD rel "
    << fd_err;
  report(6, "inference oracles",
         hess_err < 1e-10 && sand_err < 1e-10 && fd_err < 1e-6, secs, d.str());
}

// --- 7: scoring spot values and propriety ---
void criterion_scoring() {
  const auto start = Clock::now();
  const CellScores s = score_cell(0.0, 1.0);
  // truncated-series oracle for sum_k f(k)^2 at mu = 1
  double f2 = 0.0;
  for (int k = 0; k <= 60; ++k) {
    const double f = std::exp(-1.0 - std::lgamma(k + 1.0));
    f2 += f * f;
  }
  const double brier_oracle = -2.0 * std::exp(-1.0) + f2;
  bool ok = std::abs(s.logarithmic - 1.0) < 1e-12 &&
            std::abs(s.dawid_sebastiani - 1.0) < 1e-12 &&
            std::abs(s.brier - brier_oracle) < 1e-6 &&
            std::abs(s.brier - (-0.427251)) < 1e-6;

  // propriety: mean score over Poisson(2) draws is minimized at 2
  const double mu_star = 2.0, step = 0.25;
  std::mt19937_64 rng(4242);
  std::poisson_distribution<int> pois(mu_star);
  std::vector<double> draws(40000);
  for (auto& v : draws) v = pois(rng);
  auto argmin = [&](auto getter) {
    double best = 1e300, best_mu = -1.0;
    for (double g = 1.0; g <= 3.0 + 1e-9; g += step) {
      double acc = 0.0;
      for (double yv : draws) acc += getter(score_cell(yv, g));
      if (acc < best) {
        best = acc;
        best_mu = g;
      }
    }
    return best_mu;
  };
  const double m_ds = argmin([](const CellScores& c) { return c.dawid_sebastiani; });
  const double m_log = argmin([](const CellScores& c) { return c.logarithmic; });
  const double m_br = argmin([](const CellScores& c) { return c.brier; });
  const double m_sp = argmin([](const CellScores& c) { return c.spherical; });
  for (double m : {m_ds, m_log, m_br, m_sp})
    ok = ok && std::abs(m - mu_star) <= step + 1e-9;

  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << "brier " << s.brier << " (oracle " << brier_oracle << "), minima " << m_ds
    << "/" << m_log << "/" << m_br << "/" << m_sp;
  report(7, "scoring spot values", ok, secs, d.str());
}

// shared generator for the comparison criteria: strong autoregressive
// influence that the exogenous-only baseline cannot pick up
SimResult comparison_sim(unsigned seed) {
  ParameterSet truth;
  truth.theta = Eigen::Vector2d(0.0, 0.4);
  truth.alpha = Eigen::Vector2d(1.0, 0.5);
  truth.beta = Eigen::Vector2d(0.5, 0.3);
  return simulate(SimConfig::basic(12, 56, seed, truth));
}

// --- 8: cross-validated ordering vs the plain GLM baseline, 20 seeds ---
void criterion_cv_ordering() {
  const auto start = Clock::now();
  int good_seeds = 0;
  const int seeds = 20;
  std::ostringstream detail;
  for (unsigned s = 1; s <= seeds; ++s) {
    SimResult sim = comparison_sim(3000 + s);
    EvalOptions opts;
    ComparisonReport rep = run_cv(sim.y, sim.Z, sim.Ws, sim.Wr, 10, 5,
                                  100 + s, opts);
    int ds_wins = 0, log_wins = 0;
    for (size_t f = 0; f < rep.models[0].folds.size(); ++f) {
      if (rep.models[0].folds[f].dawid_sebastiani <
          rep.models[1].folds[f].dawid_sebastiani)
        ++ds_wins;
      if (rep.models[0].folds[f].logarithmic <
          rep.models[1].folds[f].logarithmic)
        ++log_wins;
    }
    if (ds_wins >= 9 && log_wins >= 9) ++good_seeds;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << good_seeds << "/" << seeds << " seeds with >=9/10 fold wins on DS and log";
  report(8, "cv baseline ordering", good_seeds * 5 >= seeds * 4 && secs < 600.0,
         secs, d.str());
}

// --- 9: temporal holdout ordering at horizons 2..5 ---
void criterion_holdout_ordering() {
  const auto start = Clock::now();
  const int seeds = 10;
  int good_seeds = 0;
  for (unsigned s = 1; s <= seeds; ++s) {
    SimResult sim = comparison_sim(7000 + s);
    EvalOptions opts;
    ComparisonReport rep =
        run_temporal_holdout(sim.y, sim.Z, sim.Ws, sim.Wr, {2, 3, 4, 5}, opts);
    bool all = true;
    for (size_t h = 0; h < rep.models[0].folds.size(); ++h)
      all = all && rep.models[0].folds[h].dawid_sebastiani <
                       rep.models[1].folds[h].dawid_sebastiani;
    if (all) ++good_seeds;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << good_seeds << "/" << seeds << " seeds where SIR wins DS at every horizon";
  report(9, "temporal holdout ordering", good_seeds * 5 >= seeds * 4, secs,
         d.str());
}

// --- 10: byte determinism across runs and thread counts ---
void criterion_determinism() {
  const auto start = Clock::now();
  const SimConfig cfg = SimConfig::basic(8, 40, 13, recovery_truth());

  auto run_once = [&](int threads) {
    omp_set_num_threads(threads);
    SimResult sim = simulate(cfg);
    SirOptions opts;
    SirFit fit = fit_sir(sim.y, sim.Z, sim.Ws, sim.Wr, opts);
    EvalOptions eopts;
    ComparisonReport rep =
        run_cv(sim.y, sim.Z, sim.Ws, sim.Wr, 3, 2, 7, eopts);
    std::ostringstream bytes;
    bytes.precision(17);
    for (int t = 0; t < sim.y.T; ++t)
      for (int i = 0; i < sim.y.n; ++i)
        for (int j = 0; j < sim.y.n; ++j)
          if (i != j) bytes << sim.y.values.at(i, j, t) << ',';
    for (long k = 0; k < fit.params.theta.size(); ++k)
      bytes << fit.params.theta[k] << ',';
    for (long k = 0; k < fit.params.alpha.size(); ++k)
      bytes << fit.params.alpha[k] << ',';
    for (long k = 0; k < fit.params.beta.size(); ++k)
      bytes << fit.params.beta[k] << ',';
    for (double ll : fit.loglik_trace) bytes << ll << ',';
    for (const auto& ms : rep.models)
      for (const auto& f : ms.folds)
        bytes << f.dawid_sebastiani << ',' << f.logarithmic << ',' << f.brier
              << ',' << f.spherical << ',' << f.rmse << ';';
    return bytes.str();
  };

  const std::string a = run_once(1);
  const std::string b = run_once(4);
  const std::string c = run_once(4);
  omp_set_num_threads(omp_get_num_procs());
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << "serialized " << a.size() << " bytes; 1-thread vs 4-thread "
    << (a == b ? "identical" : "DIFFER") << ", repeat "
    << (b == c ? "identical" : "DIFFER");
  report(10, "determinism", a == b && b == c, secs, d.str());
}

// --- 3: every trace recorded during this suite is nondecreasing ---
void criterion_monotone_traces() {
  const auto start = Clock::now();
  long checked = 0;
  bool ok = true;
  double worst = 0.0;
  for (const auto& trace : g_traces)
    for (size_t k = 1; k < trace.size(); ++k) {
      ++checked;
      const double drop =
          (trace[k - 1] - trace[k]) / (1.0 + std::abs(trace[k - 1]));
      worst = std::max(worst, drop);
      if (drop > 1e-9) ok = false;
    }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << g_traces.size() << " fits, " << checked
    << " half-step transitions, worst relative drop " << worst;
  report(3, "monotone trace", ok && !g_traces.empty(), secs, d.str());
}

} // namespace

int main() {
  std::printf("sirnet acceptance suite (threads: %d)\n", omp_get_max_threads());
  criterion_collapse_oracle();
  criterion_bilinear_equivalence();
  criterion_identifiability();
  criterion_recovery();
  criterion_inference_oracles();
  criterion_scoring();
  criterion_cv_ordering();
  criterion_holdout_ordering();
  criterion_determinism();
  criterion_monotone_traces(); // evaluated last: covers every fit above
  if (g_failures > 0)
    std::printf("%d criterion(s) FAILED\n", g_failures);
  else
    std::printf("all 10 criteria passed\n");
  return g_failures;
}
