#include "sir/scoring.hpp"

#include <cmath>

#include "sir/errors.hpp"

namespace sir {

double poisson_pmf(double k, double mu) {
  return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
}

double poisson_pmf_sq_sum(double mu, double y, const ScoreOptions& opts) {
  int kmax = opts.kmax_override.value_or(static_cast<int>(
      std::ceil(std::max(y, mu + 10.0 * std::sqrt(mu) + 20.0))));
  double acc = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const double f = poisson_pmf(k, mu);
    acc += f * f;
  }
  return acc;
}

CellScores score_cell(double y, double mu, const ScoreOptions& opts) {
  if (!(mu > 0.0))
    fail(ErrorCode::invalid_input, "score_cell: predictive rate must be positive");
  if (!(y >= 0.0) || std::abs(y - std::round(y)) > 1e-8)
    fail(ErrorCode::invalid_input, "score_cell: observed value must be a count");
  CellScores s;
  // Poisson predictive: mean mu, variance mu
  s.dawid_sebastiani = (y - mu) * (y - mu) / mu + std::log(mu);
  s.logarithmic = mu + std::lgamma(y + 1.0) - y * std::log(mu);
  const double fy = poisson_pmf(y, mu);
  const double f2 = poisson_pmf_sq_sum(mu, y, opts);
  s.brier = -2.0 * fy + f2;
  s.spherical = -fy / std::sqrt(f2);
  return s;
}

ScoreReport score_forecast(const VectorXd& y, const VectorXd& mu,
                           const ScoreOptions& opts) {
  if (y.size() != mu.size())
    fail(ErrorCode::dimension_mismatch, "score_forecast: length mismatch");
  if (y.size() == 0)
    fail(ErrorCode::invalid_input, "score_forecast: empty cell set");
  const long N = y.size();
  ScoreReport r;
  r.cells = N;
  r.dawid_sebastiani = kernels::blocked_sum(
      N, [&](long i) { return score_cell(y[i], mu[i], opts).dawid_sebastiani; },
      opts.exec);
  // one pass per rule keeps the reduction deterministic and simple; the pmf
  // series dominates the cost either way
  r.logarithmic = kernels::blocked_sum(
      N, [&](long i) { return score_cell(y[i], mu[i], opts).logarithmic; },
      opts.exec);
  r.brier = kernels::blocked_sum(
      N, [&](long i) { return score_cell(y[i], mu[i], opts).brier; }, opts.exec);
  r.spherical = kernels::blocked_sum(
      N, [&](long i) { return score_cell(y[i], mu[i], opts).spherical; },
      opts.exec);
  double sq = kernels::blocked_sum(
      N, [&](long i) { return (y[i] - mu[i]) * (y[i] - mu[i]); }, opts.exec);
  r.dawid_sebastiani /= static_cast<double>(N);
  r.logarithmic /= static_cast<double>(N);
  r.brier /= static_cast<double>(N);
  r.spherical /= static_cast<double>(N);
  r.rmse = std::sqrt(sq / static_cast<double>(N));
  return r;
}

} // namespace sir
