#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "sir/design.hpp"
#include "sir/eval.hpp"
#include "sir/fit.hpp"
#include "sir/inference.hpp"
#include "sir/sim.hpp"
#include "sir/tensor.hpp"

namespace sir::io {

enum class CovariateRole { direct, sender, receiver, both };
enum class Transform { identity, log1p };
enum class FillPolicy { strict, carry_forward };

struct CovariateUse {
  std::string name; // column name in the covariate CSV
  CovariateRole role = CovariateRole::direct;
  int lag = 1; // design slice m reads the covariate at raw period m + 1 - lag
  Transform transform = Transform::identity;
};

struct RunConfig {
  std::string events_file;
  std::string covariates_file; // may be empty when only derived columns used
  std::vector<std::string> actors;
  std::string period_start; // ISO year-month, inclusive
  std::string period_end;
  bool intercept = true;
  bool lagged_dv = false;     // log(y_ij,t-1 + 1) direct column
  bool reciprocal_dv = false; // log(y_ji,t-1 + 1) direct column
  std::vector<CovariateUse> covariates;
  FillPolicy fill = FillPolicy::strict;
  bool drop_unknown_actors = false;
  SirOptions estimator;
  ScoreOptions scoring;
  struct {
    int k = 10;
    int m = 5;
    unsigned seed = 0;
    bool overlap = false;
  } cv;
  std::vector<int> horizons = {2, 3, 4, 5};
};

struct Dataset {
  DyadTensor y;
  DirectDesign Z;
  InfluenceDesign Ws;
  InfluenceDesign Wr;
};

/// Inclusive list of ISO year-month labels.
std::vector<std::string> month_range(const std::string& start,
                                     const std::string& end);

RunConfig load_run_config(const std::string& path);

/// Aggregate `period,source,target,count` records onto the actor x period
/// grid; absent cells are zero. Unknown actors error unless drop_unknown.
DyadTensor ingest_events(const std::string& path,
                         const std::vector<std::string>& actors,
                         const std::vector<std::string>& periods,
                         bool drop_unknown = false);

/// Build the direct and influence designs from a covariate CSV
/// (`period,source,target,name,value`) plus derived columns from the tensor.
std::tuple<DirectDesign, InfluenceDesign, InfluenceDesign>
ingest_designs(const RunConfig& cfg, const DyadTensor& y);

/// Load everything a fit needs from a run config.
Dataset load_dataset(const RunConfig& cfg);

// --- serialized artifacts (versioned JSON, written atomically) ---

void write_fit_json(const std::string& path, const SirFit& fit,
                    const VcovResult& vcov, const Dataset& data);

struct LoadedFit {
  ParameterSet params;
  std::vector<std::string> theta_names, alpha_names, beta_names;
  std::vector<double> loglik_trace;
  bool converged = false;
};
LoadedFit load_fit_json(const std::string& path);

void write_scores_json(const std::string& path, const ScoreReport& report);
void write_comparison_json(const std::string& path,
                           const ComparisonReport& report,
                           const std::string& schema);

void write_predictions_csv(const std::string& path, const Cube& mu,
                           const DyadTensor& y);
/// Rows of a predictions CSV joined against the tensor: (y, mu) pairs.
std::pair<VectorXd, VectorXd> load_predictions_csv(const std::string& path,
                                                   const DyadTensor& y);

/// Edge list (actor, peer, score) of influence entries with |score| above the
/// threshold at one period.
void export_influence(const std::string& path, const InfluenceDesign& W,
                      const VectorXd& coef, int m,
                      const std::vector<std::string>& actors, double threshold);

/// Externally computed per-fold scores (`fold,dawid_sebastiani,logarithmic,
/// brier,spherical,rmse,cells`) for the comparison report.
std::vector<ScoreReport> load_external_scores(const std::string& path);

SimConfig load_sim_config(const std::string& path);

/// Emit a simulated dataset in the same file formats the loaders read, plus a
/// ready-to-run config and the generating parameters.
void write_sim_outputs(const std::string& dir, const SimConfig& cfg,
                       const SimResult& sim);

} // namespace sir::io
