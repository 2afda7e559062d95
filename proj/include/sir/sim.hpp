#pragma once

#include <string>
#include <vector>

#include "sir/design.hpp"
#include "sir/fit.hpp"
#include "sir/tensor.hpp"

namespace sir {

enum class CovariateKind {
  intercept,      // all ones (direct design only)
  normal_static,  // iid N(0, scale^2) entries, frozen over time
  ar1,            // per-cell AR(1): v_t = rho v_{t-1} + N(0, scale^2)
  self_indicator, // 1{i == i'} (influence design; the autoregressive channel)
};

struct CovariateSpec {
  std::string name;
  CovariateKind kind = CovariateKind::normal_static;
  double scale = 1.0;
  double rho = 0.8; // AR(1) only
};

struct SimConfig {
  int n = 10;
  int T = 100;
  int burn_in = 10;
  unsigned seed = 1;
  ParameterSet truth; // alpha must be canonical (alpha[0] == 1)
  std::vector<CovariateSpec> z_covariates;
  std::vector<CovariateSpec> w_covariates;
  bool shared_w = true; // Ws and Wr carry the same covariate data
  double guard = 20.0;  // error when any linear predictor exceeds this

  // A ready-to-fit default: intercept plus one exogenous direct covariate,
  // self-indicator plus one dyadic influence covariate.
  static SimConfig basic(int n, int T, unsigned seed, const ParameterSet& truth);
};

struct SimResult {
  DyadTensor y;
  DirectDesign Z;
  InfluenceDesign Ws;
  InfluenceDesign Wr;
};

struct StabilityReport {
  double max_linear_predictor = 0.0;
  bool stable = true;
};

/// Draw from the model: y_t ~ Poisson(exp(theta^T z_t + A_t x~_t B_t^T))
/// cellwise, with A_t, B_t from influence_scores and x~_t = log(y_{t-1} + 1).
/// Burn-in slices are discarded. Deterministic given the seed.
SimResult simulate(const SimConfig& config);

/// Pilot run reporting the largest linear predictor; flags configurations
/// whose positive feedback through the log-lag channel would explode.
StabilityReport stability_check(const SimConfig& config);

} // namespace sir
