#include "sir/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sir/log.hpp"

namespace sir {

namespace {

void summarize(ModelScores& ms) {
  auto rule = [&](const std::string& name, auto getter) {
    RuleSummary s;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (const auto& f : ms.folds) {
      const double v = getter(f);
      acc += v;
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    }
    s.mean = acc / static_cast<double>(ms.folds.size());
    ms.summary[name] = s;
  };
  rule("dawid_sebastiani", [](const ScoreReport& r) { return r.dawid_sebastiani; });
  rule("logarithmic", [](const ScoreReport& r) { return r.logarithmic; });
  rule("brier", [](const ScoreReport& r) { return r.brier; });
  rule("spherical", [](const ScoreReport& r) { return r.spherical; });
  rule("rmse", [](const ScoreReport& r) { return r.rmse; });
}

// Gather (y, mu) over the held-out off-diagonal cells, in index order.
std::pair<VectorXd, VectorXd> heldout_cells(const DyadTensor& y, const Cube& mu,
                                            const PeriodMask& heldout) {
  PeriodMask sorted = heldout;
  std::sort(sorted.begin(), sorted.end());
  const int n = y.n;
  const long cells = static_cast<long>(sorted.size()) * n * (n - 1);
  VectorXd yo(cells), mo(cells);
  long r = 0;
  for (int m : sorted)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        yo[r] = y.values.at(i, j, m + 1);
        mo[r] = mu.at(i, j, m);
        ++r;
      }
  return {std::move(yo), std::move(mo)};
}

// Plain Poisson GLM on the direct design alone, the no-dependence baseline.
GlmFit fit_baseline(const DyadTensor& y, const DirectDesign& Z,
                    const PeriodMask& mask, const GlmOptions& opts) {
  auto [index, resp] = flatten(y, mask);
  MatrixXd Zmat = flatten_design(Z, index);
  return fit_poisson(Zmat, resp, std::nullopt, std::nullopt, opts);
}

Cube predict_baseline(const GlmFit& fit, const DirectDesign& Z) {
  const int n = Z.n();
  const int Tm = Z.Tm();
  Cube mu(n, Tm, std::numeric_limits<double>::quiet_NaN());
  for (int m = 0; m < Tm; ++m)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        double eta = 0.0;
        for (int k = 0; k < Z.q; ++k)
          eta += fit.coefficients[k] * Z.cols[k].at(i, j, m);
        mu.at(i, j, m) = std::exp(eta);
      }
  return mu;
}

ComparisonReport score_folds(const DyadTensor& y, const DirectDesign& Z,
                             const InfluenceDesign& Ws,
                             const InfluenceDesign& Wr, const CvPlan& plan,
                             const EvalOptions& opts) {
  ModelScores sir_scores{"sir", {}, {}};
  ModelScores glm_scores{"glm", {}, {}};
  ComparisonReport report;
  report.plan = plan;

  for (size_t f = 0; f < plan.folds.size(); ++f) {
    const PeriodMask& heldout = plan.folds[f];
    SIR_LOG(1) << "fold " << f + 1 << "/" << plan.folds.size() << ": holding out "
               << heldout.size() << " periods";

    SirFit fit = fit_sir(y, Z, Ws, Wr, opts.sir, heldout);
    Cube mu_sir = predict_with_chaining(fit.params, y, Z, Ws, Wr, heldout);
    auto [yo, mo] = heldout_cells(y, mu_sir, heldout);
    sir_scores.folds.push_back(score_forecast(yo, mo, opts.scoring));

    GlmFit base = fit_baseline(y, Z, heldout, opts.sir.glm);
    Cube mu_glm = predict_baseline(base, Z);
    auto [yg, mg] = heldout_cells(y, mu_glm, heldout);
    glm_scores.folds.push_back(score_forecast(yg, mg, opts.scoring));

    if (yo.size() != yg.size())
      fail(ErrorCode::invalid_input, "models scored on different cell sets");
    report.fold_cells.push_back(yo.size());
  }

  summarize(sir_scores);
  summarize(glm_scores);
  report.models.push_back(std::move(sir_scores));
  report.models.push_back(std::move(glm_scores));
  return report;
}

} // namespace

CvPlan make_cv_plan(int modeled_periods, int k, int m, unsigned seed,
                    bool overlap) {
  if (k < 1 || m < 1)
    fail(ErrorCode::infeasible_folds, "cv plan needs k >= 1 and m >= 1");
  if (m >= modeled_periods)
    fail(ErrorCode::infeasible_folds,
         "cannot hold out " + std::to_string(m) + " of " +
             std::to_string(modeled_periods) + " modeled periods");
  if (!overlap && k * m > modeled_periods)
    fail(ErrorCode::infeasible_folds,
         "disjoint folds need k*m <= modeled periods (" + std::to_string(k * m) +
             " > " + std::to_string(modeled_periods) + "); pass overlap to allow reuse");

  CvPlan plan;
  plan.k = k;
  plan.m = m;
  plan.seed = seed;
  plan.overlap = overlap;
  std::mt19937 rng(seed);
  std::vector<int> periods(modeled_periods);
  std::iota(periods.begin(), periods.end(), 0);
  if (overlap) {
    for (int f = 0; f < k; ++f) {
      std::vector<int> pool = periods;
      std::shuffle(pool.begin(), pool.end(), rng);
      PeriodMask fold(pool.begin(), pool.begin() + m);
      std::sort(fold.begin(), fold.end());
      plan.folds.push_back(std::move(fold));
    }
  } else {
    std::shuffle(periods.begin(), periods.end(), rng);
    for (int f = 0; f < k; ++f) {
      PeriodMask fold(periods.begin() + static_cast<long>(f) * m,
                      periods.begin() + static_cast<long>(f + 1) * m);
      std::sort(fold.begin(), fold.end());
      plan.folds.push_back(std::move(fold));
    }
  }
  return plan;
}

Cube predict_with_chaining(const ParameterSet& params, const DyadTensor& y,
                           const DirectDesign& Z, const InfluenceDesign& Ws,
                           const InfluenceDesign& Wr,
                           const PeriodMask& heldout) {
  const int n = y.n;
  const int Tm = y.modeled_periods();
  Cube mu(n, Tm, std::numeric_limits<double>::quiet_NaN());
  MatrixXd x_slice(n, n);
  for (int m = 0; m < Tm; ++m) {
    if (m >= 1 && mask_contains(heldout, m - 1)) {
      // source slice m was held out: feed the forecast through the lag/log map
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          x_slice(i, j) = i == j ? 0.0 : std::log1p(mu.at(i, j, m - 1));
    } else {
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          x_slice(i, j) = i == j ? 0.0 : std::log1p(y.values.at(i, j, m));
    }
    mu.slice(m) = predict_mu_slice(params, Z, Ws, Wr, x_slice, m);
  }
  return mu;
}

ComparisonReport run_cv(const DyadTensor& y, const DirectDesign& Z,
                        const InfluenceDesign& Ws, const InfluenceDesign& Wr,
                        int k, int m, unsigned seed, const EvalOptions& opts,
                        bool overlap) {
  y.validate();
  CvPlan plan = make_cv_plan(y.modeled_periods(), k, m, seed, overlap);
  const long remaining =
      static_cast<long>(y.modeled_periods() - m) * y.n * (y.n - 1);
  if (remaining < Z.q + Ws.p + 1)
    fail(ErrorCode::infeasible_folds,
         "not enough training observations left after masking");
  return score_folds(y, Z, Ws, Wr, plan, opts);
}

ComparisonReport run_temporal_holdout(const DyadTensor& y,
                                      const DirectDesign& Z,
                                      const InfluenceDesign& Ws,
                                      const InfluenceDesign& Wr,
                                      const std::vector<int>& horizons,
                                      const EvalOptions& opts) {
  y.validate();
  const int Tm = y.modeled_periods();
  CvPlan plan;
  plan.k = static_cast<int>(horizons.size());
  plan.m = 0;
  plan.seed = 0;
  for (int x : horizons) {
    if (x < 1)
      fail(ErrorCode::invalid_input,
           "holdout horizon must be >= 1 (the test set cannot be empty)");
    if (x >= y.T)
      fail(ErrorCode::invalid_input, "holdout horizon " + std::to_string(x) +
                                         " >= T = " + std::to_string(y.T));
    if (Tm - x < 1)
      fail(ErrorCode::invalid_input, "no training periods left at horizon " +
                                         std::to_string(x));
    PeriodMask fold;
    for (int m = Tm - x; m < Tm; ++m) fold.push_back(m);
    plan.folds.push_back(std::move(fold));
  }
  return score_folds(y, Z, Ws, Wr, plan, opts);
}

void attach_external_scores(ComparisonReport& report, const std::string& model,
                            std::vector<ScoreReport> folds) {
  ModelScores ms{model, std::move(folds), {}};
  summarize(ms);
  report.models.push_back(std::move(ms));
}

} // namespace sir
