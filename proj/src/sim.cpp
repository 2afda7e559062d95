#include "sir/sim.hpp"

#include <cmath>
#include <random>

namespace sir {

namespace {

std::string month_label(int index) {
  // ISO year-month starting at 2001-01, matching the CSV formats
  const int year = 2001 + index / 12;
  const int month = 1 + index % 12;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

std::vector<Cube> gen_covariates(const std::vector<CovariateSpec>& specs,
                                 int n, int slices, bool influence,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Cube> cols;
  cols.reserve(specs.size());
  for (const auto& spec : specs) {
    Cube c(n, slices, 0.0);
    switch (spec.kind) {
      case CovariateKind::intercept:
        for (int m = 0; m < slices; ++m)
          for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
              c.at(i, j, m) = (influence || i != j) ? 1.0 : 0.0;
        break;
      case CovariateKind::self_indicator:
        for (int m = 0; m < slices; ++m)
          for (int i = 0; i < n; ++i) c.at(i, i, m) = 1.0;
        break;
      case CovariateKind::normal_static: {
        MatrixXd base(n, n);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) base(i, j) = spec.scale * gauss(rng);
        if (!influence) base.diagonal().setZero();
        for (int m = 0; m < slices; ++m) c.slice(m) = base;
        break;
      }
      case CovariateKind::ar1: {
        const double stat_sd =
            spec.scale / std::sqrt(std::max(1e-12, 1.0 - spec.rho * spec.rho));
        MatrixXd cur(n, n);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) cur(i, j) = stat_sd * gauss(rng);
        for (int m = 0; m < slices; ++m) {
          if (m > 0)
            for (int j = 0; j < n; ++j)
              for (int i = 0; i < n; ++i)
                cur(i, j) = spec.rho * cur(i, j) + spec.scale * gauss(rng);
          MatrixXd v = cur;
          if (!influence) v.diagonal().setZero();
          c.slice(m) = v;
        }
        break;
      }
    }
    cols.push_back(std::move(c));
  }
  return cols;
}

std::vector<Cube> tail_slices(const std::vector<Cube>& cols, int from,
                              int count) {
  std::vector<Cube> out;
  out.reserve(cols.size());
  for (const auto& c : cols) {
    Cube t(c.n(), count, 0.0);
    for (int m = 0; m < count; ++m) t.slice(m) = c.slice(from + m);
    out.push_back(std::move(t));
  }
  return out;
}

struct GenOutcome {
  SimResult result;
  double max_lp = 0.0;
  bool exploded = false;
};

GenOutcome generate(const SimConfig& cfg, bool throw_on_explosion) {
  if (cfg.n < 2 || cfg.T < 2)
    fail(ErrorCode::invalid_input, "simulate: need n >= 2 and T >= 2");
  if (cfg.burn_in < 1)
    fail(ErrorCode::invalid_input, "simulate: burn_in must be >= 1");
  const int q = static_cast<int>(cfg.z_covariates.size());
  const int p = static_cast<int>(cfg.w_covariates.size());
  if (cfg.truth.theta.size() != q || cfg.truth.alpha.size() != p ||
      cfg.truth.beta.size() != p)
    fail(ErrorCode::dimension_mismatch,
         "simulate: truth dimensions do not match covariate specs");
  if (p > 0 && std::abs(cfg.truth.alpha[0] - 1.0) > 1e-12)
    fail(ErrorCode::invalid_input, "simulate: true alpha must be canonical");

  const int n = cfg.n;
  const int G = cfg.burn_in + cfg.T;      // generated raw periods
  const int S = G - 1;                    // generated transitions
  std::mt19937_64 rng(cfg.seed);

  auto z_cols = gen_covariates(cfg.z_covariates, n, S, false, rng);
  auto w_cols = gen_covariates(cfg.w_covariates, n, S, true, rng);

  InfluenceDesign Ws_full;
  Ws_full.p = p;
  Ws_full.side = InfluenceSide::sender;
  for (const auto& spec : cfg.w_covariates) Ws_full.names.push_back(spec.name);
  Ws_full.cols = w_cols;
  InfluenceDesign Wr_full = Ws_full;
  Wr_full.side = InfluenceSide::receiver;
  if (!cfg.shared_w) {
    Wr_full.cols = gen_covariates(cfg.w_covariates, n, S, true, rng);
  }

  GenOutcome out;
  Cube raw(n, G, 0.0);
  MatrixXd x_prev = MatrixXd::Zero(n, n); // log-lag of the previous slice

  for (int g = 0; g < G; ++g) {
    const int s = std::max(0, g - 1); // design slice for this transition
    MatrixXd A = MatrixXd::Zero(n, n);
    MatrixXd B = MatrixXd::Zero(n, n);
    for (int k = 0; k < p; ++k) {
      A += cfg.truth.alpha[k] * Ws_full.cols[k].slice(s);
      B += cfg.truth.beta[k] * Wr_full.cols[k].slice(s);
    }
    const MatrixXd bilinear = A * x_prev * B.transpose();

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        double lp = bilinear(i, j);
        for (int k = 0; k < q; ++k)
          lp += cfg.truth.theta[k] * z_cols[k].at(i, j, s);
        out.max_lp = std::max(out.max_lp, lp);
        if (lp > cfg.guard) {
          out.exploded = true;
          if (throw_on_explosion)
            fail(ErrorCode::instability,
                 "simulate: linear predictor exceeded the overflow guard (" +
                     std::to_string(lp) +
                     "); shrink ||alpha||*||beta|| or lower the intercept");
          raw.at(i, j, g) = 0.0;
          continue;
        }
        std::poisson_distribution<long long> pois(std::exp(lp));
        raw.at(i, j, g) = static_cast<double>(pois(rng));
      }
    if (out.exploded && !throw_on_explosion) break;

    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        x_prev(i, j) = i == j ? 0.0 : std::log1p(raw.at(i, j, g));
  }

  // keep the last T raw slices and the matching T-1 design slices
  std::vector<std::string> actors(n);
  for (int i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "a%02d", i + 1);
    actors[i] = buf;
  }
  std::vector<std::string> periods(cfg.T);
  for (int t = 0; t < cfg.T; ++t) periods[t] = month_label(t);

  DyadTensor y(n, cfg.T, actors, periods);
  for (int t = 0; t < cfg.T; ++t)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (i != j) y.values.at(i, j, t) = raw.at(i, j, cfg.burn_in + t);

  DirectDesign Z;
  Z.q = q;
  Z.intercept = !cfg.z_covariates.empty() &&
                cfg.z_covariates.front().kind == CovariateKind::intercept;
  for (const auto& spec : cfg.z_covariates) Z.names.push_back(spec.name);
  Z.cols = tail_slices(z_cols, cfg.burn_in, cfg.T - 1);

  InfluenceDesign Ws = Ws_full;
  Ws.cols = tail_slices(Ws_full.cols, cfg.burn_in, cfg.T - 1);
  InfluenceDesign Wr = Wr_full;
  Wr.cols = tail_slices(Wr_full.cols, cfg.burn_in, cfg.T - 1);

  out.result = SimResult{std::move(y), std::move(Z), std::move(Ws), std::move(Wr)};
  return out;
}

} // namespace

SimConfig SimConfig::basic(int n, int T, unsigned seed,
                           const ParameterSet& truth) {
  SimConfig cfg;
  cfg.n = n;
  cfg.T = T;
  cfg.seed = seed;
  cfg.truth = truth;
  const int q = static_cast<int>(truth.theta.size());
  const int p = static_cast<int>(truth.alpha.size());
  if (q > 0)
    cfg.z_covariates.push_back({"intercept", CovariateKind::intercept, 1.0, 0.0});
  for (int k = 1; k < q; ++k)
    cfg.z_covariates.push_back(
        {"z" + std::to_string(k + 1), CovariateKind::normal_static, 1.0, 0.0});
  if (p > 0)
    cfg.w_covariates.push_back({"self", CovariateKind::self_indicator, 1.0, 0.0});
  for (int k = 1; k < p; ++k)
    cfg.w_covariates.push_back({"w" + std::to_string(k + 1),
                                CovariateKind::normal_static, 1.0 / n, 0.0});
  return cfg;
}

SimResult simulate(const SimConfig& config) {
  return generate(config, true).result;
}

StabilityReport stability_check(const SimConfig& config) {
  GenOutcome out = generate(config, false);
  return {out.max_lp, !out.exploded};
}

} // namespace sir
