#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sir/kernels.hpp"

namespace sir {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct GlmOptions {
  double tol = 1e-10; // relative deviance change
  int max_iter = 50;
  kernels::Exec exec = kernels::Exec::parallel;
};

struct GlmFit {
  VectorXd coefficients;
  MatrixXd fisher_info; // X^T diag(mu) X at the optimum
  double deviance = 0.0;
  double loglik = 0.0; // includes the -log(y!) constant
  int iterations = 0;
  bool converged = false;
};

/// Poisson log-link maximum likelihood via iteratively weighted least squares.
///
/// Each step solves the weighted least-squares problem by QR on the weighted
/// design (collapsed covariates can be near-collinear early in the alternating
/// loop, so normal equations are avoided). Steps that would lower the
/// log-likelihood are halved back toward the previous iterate.
GlmFit fit_poisson(const MatrixXd& X, const VectorXd& y,
                   const std::optional<VectorXd>& offset = std::nullopt,
                   const std::optional<VectorXd>& init = std::nullopt,
                   const GlmOptions& opts = {});

/// sum_i (y_i log mu_i - mu_i - log y_i!). Requires mu > 0.
double loglik_poisson(const VectorXd& mu, const VectorXd& y,
                      kernels::Exec exec = kernels::Exec::parallel);

double poisson_deviance(const VectorXd& mu, const VectorXd& y,
                        kernels::Exec exec = kernels::Exec::parallel);

} // namespace sir
