#include "sir/glm.hpp"

#include <cmath>
#include <sstream>

namespace sir {

namespace {

void validate_inputs(const MatrixXd& X, const VectorXd& y) {
  if (X.rows() != y.size())
    fail(ErrorCode::dimension_mismatch, "fit_poisson: X rows != y length");
  if (X.rows() < X.cols())
    fail(ErrorCode::invalid_input, "fit_poisson: fewer observations than parameters");
  if (!X.allFinite())
    fail(ErrorCode::invalid_input, "fit_poisson: design matrix has non-finite entries");
  for (long i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0))
      fail(ErrorCode::invalid_input, "fit_poisson: negative response at row " +
                                         std::to_string(i));
    if (std::abs(y[i] - std::round(y[i])) > 1e-8)
      fail(ErrorCode::invalid_input,
           "fit_poisson: non-integral response at row " + std::to_string(i));
  }
}

// Weighted LS solve by QR of sqrt(w) * X; errors on rank deficiency, naming
// the aliased columns so the caller can fix its covariate bookkeeping.
VectorXd wls_solve(const MatrixXd& X, const VectorXd& z, const VectorXd& w) {
  const long N = X.rows();
  const int d = static_cast<int>(X.cols());
  MatrixXd A(N, d);
  VectorXd b(N);
  for (long r = 0; r < N; ++r) {
    const double s = std::sqrt(w[r]);
    A.row(r) = s * X.row(r);
    b[r] = s * z[r];
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < d) {
    const auto perm = qr.colsPermutation().indices();
    std::ostringstream msg;
    msg << "design matrix is rank deficient (rank " << qr.rank() << " of " << d
        << "); aliased column(s):";
    for (int k = qr.rank(); k < d; ++k) msg << ' ' << perm[k];
    fail(ErrorCode::singular_design, msg.str());
  }
  return qr.solve(b);
}

double sum_log_factorial(const VectorXd& y, kernels::Exec exec) {
  return kernels::blocked_sum(
      y.size(), [&](long i) { return std::lgamma(y[i] + 1.0); }, exec);
}

} // namespace

double loglik_poisson(const VectorXd& mu, const VectorXd& y,
                      kernels::Exec exec) {
  if (mu.size() != y.size())
    fail(ErrorCode::dimension_mismatch, "loglik_poisson: length mismatch");
  for (long i = 0; i < mu.size(); ++i)
    if (!(mu[i] > 0.0))
      fail(ErrorCode::invalid_input,
           "loglik_poisson: rate must be positive at row " + std::to_string(i));
  return kernels::blocked_sum(
      y.size(),
      [&](long i) {
        return y[i] * std::log(mu[i]) - mu[i] - std::lgamma(y[i] + 1.0);
      },
      exec);
}

double poisson_deviance(const VectorXd& mu, const VectorXd& y,
                        kernels::Exec exec) {
  return kernels::blocked_sum(
      y.size(),
      [&](long i) {
        double term = y[i] > 0.0 ? y[i] * std::log(y[i] / mu[i]) : 0.0;
        return 2.0 * (term - (y[i] - mu[i]));
      },
      exec);
}

GlmFit fit_poisson(const MatrixXd& X, const VectorXd& y,
                   const std::optional<VectorXd>& offset,
                   const std::optional<VectorXd>& init,
                   const GlmOptions& opts) {
  validate_inputs(X, y);
  const long N = X.rows();
  const int d = static_cast<int>(X.cols());
  const VectorXd off = offset.value_or(VectorXd::Zero(N));
  if (off.size() != N)
    fail(ErrorCode::dimension_mismatch, "fit_poisson: offset length mismatch");
  const double logfact = sum_log_factorial(y, opts.exec);

  auto loglik_at = [&](const VectorXd& mu) {
    return kernels::blocked_sum(
               N, [&](long i) { return y[i] * std::log(mu[i]) - mu[i]; },
               opts.exec) -
           logfact;
  };

  VectorXd beta;
  VectorXd eta, mu;
  if (init) {
    if (init->size() != d)
      fail(ErrorCode::dimension_mismatch, "fit_poisson: init length mismatch");
    beta = *init;
  } else {
    // standard IWLS start: working response log(y + 0.5)
    VectorXd mu0 = (y.array() + 0.5).matrix();
    VectorXd z0 = (mu0.array().log() - off.array()).matrix();
    beta = wls_solve(X, z0, mu0);
  }
  eta = X * beta + off;
  mu = eta.array().exp().matrix();

  // If the starting point already overflows, shrink toward zero.
  for (int guard = 0; !mu.allFinite() && guard < 64; ++guard) {
    beta *= 0.5;
    eta = X * beta + off;
    mu = eta.array().exp().matrix();
  }
  if (!mu.allFinite())
    fail(ErrorCode::divergence, "fit_poisson: could not find a finite start");

  double ll = loglik_at(mu);
  double dev = poisson_deviance(mu, y, opts.exec);

  GlmFit fit;
  fit.converged = false;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    VectorXd z = ((eta - off).array() + (y - mu).array() / mu.array()).matrix();
    VectorXd proposal = wls_solve(X, z, mu);

    // step-halving: accept the first step that does not lower the loglik
    double lam = 1.0;
    VectorXd beta_try, eta_try, mu_try;
    double ll_try = 0.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      beta_try = beta + lam * (proposal - beta);
      eta_try = X * beta_try + off;
      mu_try = eta_try.array().exp().matrix();
      if (mu_try.allFinite()) {
        ll_try = loglik_at(mu_try);
        if (std::isfinite(ll_try) && ll_try >= ll - 1e-12 * (1.0 + std::abs(ll))) {
          accepted = true;
          break;
        }
      }
      lam *= 0.5;
    }
    if (!accepted)
      fail(ErrorCode::divergence,
           "fit_poisson: step-halving failed to restore a finite, "
           "non-decreasing log-likelihood");

    beta = beta_try;
    eta = eta_try;
    mu = mu_try;
    ll = ll_try;
    const double dev_new = poisson_deviance(mu, y, opts.exec);
    const double rel = std::abs(dev - dev_new) / (0.1 + std::abs(dev_new));
    dev = dev_new;
    if (rel < opts.tol) {
      fit.converged = true;
      ++iter;
      break;
    }
  }

  // all rates driven to zero means the MLE sits on the boundary (mu -> 0,
  // coefficients diverging); the deviance criterion can stall there
  if (mu.maxCoeff() < 1e-8)
    fail(ErrorCode::boundary_mle,
         "fit_poisson: fitted rates collapse toward zero (boundary MLE; "
         "response is degenerate)");

  fit.coefficients = beta;
  fit.fisher_info = kernels::weighted_cross(X, mu, opts.exec);
  fit.deviance = dev;
  fit.loglik = ll;
  fit.iterations = iter;
  return fit;
}

} // namespace sir
