#pragma once

#include <optional>

#include <Eigen/Dense>

#include "sir/kernels.hpp"

namespace sir {

using Eigen::VectorXd;

struct ScoreOptions {
  // Series cutoff for sum_k f(k)^2; defaults to max(y, mu + 10 sqrt(mu) + 20),
  // which bounds the dropped tail well below 1e-12.
  std::optional<int> kmax_override;
  kernels::Exec exec = kernels::Exec::parallel;
};

struct CellScores {
  double dawid_sebastiani = 0.0;
  double logarithmic = 0.0;
  double brier = 0.0;
  double spherical = 0.0; // negated so that lower is better, like the others
};

struct ScoreReport {
  double dawid_sebastiani = 0.0;
  double logarithmic = 0.0;
  double brier = 0.0;
  double spherical = 0.0;
  double rmse = 0.0;
  long cells = 0;
};

/// Poisson(mu) probability mass at count k.
double poisson_pmf(double k, double mu);

/// sum_k f(k)^2 for the Poisson(mu) pmf, truncated per ScoreOptions.
double poisson_pmf_sq_sum(double mu, double y, const ScoreOptions& opts = {});

/// Proper scores of a single observed count against a Poisson(mu) forecast.
CellScores score_cell(double y, double mu, const ScoreOptions& opts = {});

/// Mean scores plus RMSE over a set of cells.
ScoreReport score_forecast(const VectorXd& y, const VectorXd& mu,
                           const ScoreOptions& opts = {});

} // namespace sir
