#pragma once

#include <optional>
#include <vector>

#include "sir/design.hpp"
#include "sir/glm.hpp"
#include "sir/tensor.hpp"

namespace sir {

/// (theta, alpha, beta). Canonical form fixes alpha[0] = 1; the overall scale
/// of the bilinear term lives in beta.
struct ParameterSet {
  VectorXd theta;
  VectorXd alpha;
  VectorXd beta;
};

struct SirOptions {
  double tol = 1e-8; // relative log-likelihood change across outer iterations
  int max_outer = 100;
  std::optional<VectorXd> beta0; // default (1,...,1)/sqrt(p)
  int multi_start = 0;           // extra random-sphere starts
  unsigned seed = 1;
  GlmOptions glm;
  kernels::Exec exec = kernels::Exec::parallel;
};

struct MultiStartInfo {
  int starts = 1;
  std::vector<double> logliks;
  double max_param_spread = 0.0; // max |param difference| across canonical fits
  bool disagreement = false;
};

struct SirFit {
  ParameterSet params; // canonical
  std::vector<double> loglik_trace; // one entry per half-step, nondecreasing
  int outer_iterations = 0;
  bool converged = false;
  GlmFit half_step_alpha; // final fit of (theta, alpha) given beta
  GlmFit half_step_beta;  // final fit of (theta, beta) given alpha
  MultiStartInfo multistart;
  PeriodMask mask;

  double loglik() const {
    return loglik_trace.empty() ? 0.0 : loglik_trace.back();
  }
};

/// Canonical parameterization: (theta, alpha/alpha_1, beta*alpha_1).
/// Fitted rates are invariant. Errors when alpha_1 is within 1e-8 of zero.
ParameterSet canonicalize(const ParameterSet& params);

/// Alternating block-coordinate MLE: half-step 1 fits (theta, alpha) on
/// [Z | X~ beta], half-step 2 fits (theta, beta) on [Z | X~^T alpha]. Each
/// half-step is warm-started at the current point, so the trace cannot
/// decrease.
SirFit fit_sir(const DyadTensor& y, const DirectDesign& Z,
               const InfluenceDesign& Ws, const InfluenceDesign& Wr,
               const SirOptions& opts = {}, const PeriodMask& mask = {});

/// Rates mu_ijt = exp(theta^T z_ijt + alpha^T X~_ijt beta) for every
/// unmasked off-diagonal modeled cell (all other cells NaN). Invariant under
/// rescaling (alpha, beta) -> (alpha/c, c beta).
Cube predict_mu(const ParameterSet& params, const DirectDesign& Z,
                const InfluenceDesign& Ws, const InfluenceDesign& Wr,
                const PredictorTensor& x, const PeriodMask& mask = {},
                kernels::Exec exec = kernels::Exec::parallel);

/// Single-period variant used by iterated forecasting; x_slice is the n x n
/// predictor matrix with zero diagonal.
MatrixXd predict_mu_slice(const ParameterSet& params, const DirectDesign& Z,
                          const InfluenceDesign& Ws, const InfluenceDesign& Wr,
                          const MatrixXd& x_slice, int m);

} // namespace sir
