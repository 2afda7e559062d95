#pragma once

#include <string>
#include <vector>

#include "sir/fit.hpp"

namespace sir {

/// Variance estimates for the identifiable parameterization
/// psi = (theta, alpha_2..alpha_p, beta_1..beta_p), d = q + (p-1) + p.
struct VcovResult {
  MatrixXd vcov_hessian;  // (-H)^{-1}
  MatrixXd vcov_sandwich; // H^{-1} S H^{-1}
  VectorXd se_hessian;
  VectorXd se_sandwich;
  std::vector<std::string> names;
};

struct SirData {
  const DyadTensor* y = nullptr;
  const DirectDesign* Z = nullptr;
  const InfluenceDesign* Ws = nullptr;
  const InfluenceDesign* Wr = nullptr;
  PeriodMask mask;
};

/// Total score and analytic Hessian of the log-likelihood in psi at the given
/// canonical parameters. The gradient of the linear predictor per observation
/// is (z, (X~ beta)_{2..p}, X~^T alpha); the only nonzero second derivative of
/// the predictor is the alpha x beta cross block, which equals X~ with the
/// alpha_1 row removed.
std::pair<VectorXd, MatrixXd> score_and_hessian(const ParameterSet& params,
                                                const SirData& data);

/// Hessian-based and sandwich variance for a converged fit. S is the sum of
/// per-observation score outer products.
VcovResult compute_vcov(const SirFit& fit, const SirData& data);

/// Same variance machinery for a plain Poisson GLM (used by the baseline
/// model and by closed-form oracles): H = -X^T diag(mu) X,
/// S = sum (y_i - mu_i)^2 x_i x_i^T.
VcovResult compute_vcov_glm(const MatrixXd& X, const VectorXd& y,
                            const VectorXd& coefficients,
                            std::vector<std::string> names = {});

/// Per-parameter names for psi, derived from the design covariate names.
std::vector<std::string> psi_names(const DirectDesign& Z,
                                   const InfluenceDesign& Ws,
                                   const InfluenceDesign& Wr);

} // namespace sir
