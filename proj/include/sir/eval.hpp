#pragma once

#include <map>
#include <string>
#include <vector>

#include "sir/fit.hpp"
#include "sir/scoring.hpp"

namespace sir {

struct CvPlan {
  int k = 10;
  int m = 5;
  unsigned seed = 0;
  bool overlap = false;
  std::vector<PeriodMask> folds; // held-out modeled periods per fold
};

struct RuleSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ModelScores {
  std::string model;
  std::vector<ScoreReport> folds;
  std::map<std::string, RuleSummary> summary; // per rule
};

struct ComparisonReport {
  CvPlan plan;
  std::vector<ModelScores> models; // "sir", "glm", plus any external entries
  std::vector<long> fold_cells;
};

struct EvalOptions {
  SirOptions sir;
  ScoreOptions scoring;
};

/// Disjoint (default) random assignment of held-out modeled periods to folds;
/// with `overlap`, folds draw independently. Deterministic given the seed.
CvPlan make_cv_plan(int modeled_periods, int k, int m, unsigned seed,
                    bool overlap = false);

/// Fit on unmasked periods, forecast the held-out slices and score SIR against
/// the plain Poisson GLM baseline (the direct design only) on identical cells.
ComparisonReport run_cv(const DyadTensor& y, const DirectDesign& Z,
                        const InfluenceDesign& Ws, const InfluenceDesign& Wr,
                        int k, int m, unsigned seed,
                        const EvalOptions& opts = {}, bool overlap = false);

/// Train on everything before the last x raw periods and forecast them by
/// iterated one-step-ahead prediction, for each horizon x.
ComparisonReport run_temporal_holdout(const DyadTensor& y,
                                      const DirectDesign& Z,
                                      const InfluenceDesign& Ws,
                                      const InfluenceDesign& Wr,
                                      const std::vector<int>& horizons,
                                      const EvalOptions& opts = {});

/// Rates for every modeled period with held-out responses replaced by chained
/// forecasts: the lag of a held-out slice is log(mu_hat + 1) of the previous
/// prediction, while training slices keep their true lags.
Cube predict_with_chaining(const ParameterSet& params, const DyadTensor& y,
                           const DirectDesign& Z, const InfluenceDesign& Ws,
                           const InfluenceDesign& Wr, const PeriodMask& heldout);

/// Attach externally computed per-fold scores (e.g. a boosted-tree baseline)
/// to a report under the given model name.
void attach_external_scores(ComparisonReport& report, const std::string& model,
                            std::vector<ScoreReport> folds);

} // namespace sir
