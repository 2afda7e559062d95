#include "sir/fit.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "sir/log.hpp"

namespace sir {

namespace {

struct FlatData {
  ObservationIndex index;
  VectorXd y;
  MatrixXd Z; // N x q
};

void check_alignment(const DyadTensor& y, const DirectDesign& Z,
                     const InfluenceDesign& Ws, const InfluenceDesign& Wr) {
  const int Tm = y.modeled_periods();
  if (Z.q == 0) fail(ErrorCode::invalid_input, "direct design is empty");
  if (Z.n() != y.n || Z.Tm() != Tm)
    fail(ErrorCode::dimension_mismatch, "direct design shape does not match tensor");
  if (Ws.n() != y.n || Ws.Tm() != Tm || Wr.n() != y.n || Wr.Tm() != Tm)
    fail(ErrorCode::dimension_mismatch,
         "influence design shape does not match tensor");
  if (Ws.p != Wr.p)
    fail(ErrorCode::dimension_mismatch, "sender/receiver designs disagree on p");
}

SirFit fit_single_start(const FlatData& data, const PredictorTensor& x,
                        const InfluenceDesign& Ws, const InfluenceDesign& Wr,
                        const VectorXd& beta0, const SirOptions& opts) {
  const int q = static_cast<int>(data.Z.cols());
  const int p = static_cast<int>(beta0.size());
  const long N = data.index.rows();

  MatrixXd design(N, q + p);
  design.leftCols(q) = data.Z;

  GlmOptions glm_opts = opts.glm;
  glm_opts.exec = opts.exec;

  SirFit fit;
  fit.loglik_trace.reserve(2 * opts.max_outer);

  VectorXd theta = VectorXd::Zero(q);
  VectorXd alpha = VectorXd::Zero(p);
  VectorXd beta = beta0;
  double prev_ll = -std::numeric_limits<double>::infinity();

  GlmFit glm_a, glm_b;
  int outer = 0;
  for (; outer < opts.max_outer; ++outer) {
    // half-step 1: (theta, alpha) given beta
    auto V = collapse_beta(x, Ws, Wr, beta, opts.exec);
    kernels::fill_design_rows(V, data.index, design, q, opts.exec);
    std::optional<VectorXd> warm;
    if (outer > 0) {
      VectorXd w(q + p);
      w << theta, alpha;
      warm = w;
    }
    try {
      glm_a = fit_poisson(design, data.y, std::nullopt, warm, glm_opts);
    } catch (const SirError& e) {
      fail(e.code(), std::string("half-step (theta,alpha): ") + e.what());
    }
    theta = glm_a.coefficients.head(q);
    alpha = glm_a.coefficients.tail(p);
    fit.loglik_trace.push_back(glm_a.loglik);

    // half-step 2: (theta, beta) given alpha
    auto U = collapse_alpha(x, Ws, Wr, alpha, opts.exec);
    kernels::fill_design_rows(U, data.index, design, q, opts.exec);
    VectorXd warm_b(q + p);
    warm_b << theta, beta;
    try {
      glm_b = fit_poisson(design, data.y, std::nullopt, warm_b, glm_opts);
    } catch (const SirError& e) {
      fail(e.code(), std::string("half-step (theta,beta): ") + e.what());
    }
    theta = glm_b.coefficients.head(q);
    beta = glm_b.coefficients.tail(p);
    fit.loglik_trace.push_back(glm_b.loglik);

    const double ll = glm_b.loglik;
    SIR_LOG(2) << "outer " << outer + 1 << " loglik " << ll;
    if (outer > 0 &&
        std::abs(ll - prev_ll) < opts.tol * (1.0 + std::abs(ll))) {
      fit.converged = true;
      ++outer;
      break;
    }
    prev_ll = ll;
  }

  // warm starts plus step-halving make each half-step a true ascent; a drop
  // in the trace means a bug, not noise
  for (size_t k = 1; k < fit.loglik_trace.size(); ++k)
    if (fit.loglik_trace[k] <
        fit.loglik_trace[k - 1] -
            1e-9 * (1.0 + std::abs(fit.loglik_trace[k - 1])))
      fail(ErrorCode::divergence,
           "half-step log-likelihood decreased; alternating ascent violated");

  fit.outer_iterations = outer;
  fit.params = canonicalize({theta, alpha, beta});
  fit.half_step_alpha = glm_a;
  fit.half_step_beta = glm_b;
  return fit;
}

} // namespace

ParameterSet canonicalize(const ParameterSet& params) {
  if (params.alpha.size() == 0)
    fail(ErrorCode::invalid_input, "canonicalize: empty alpha");
  const double c = params.alpha[0];
  if (std::abs(c) < 1e-8)
    fail(ErrorCode::non_identifiable,
         "leading influence coefficient alpha_1 is within 1e-8 of zero; the "
         "(alpha, beta) scale is not identified in this direction. Reorder the "
         "influence covariates so a covariate with nonzero sender effect comes "
         "first.");
  ParameterSet out;
  out.theta = params.theta;
  out.alpha = params.alpha / c;
  out.beta = params.beta * c;
  return out;
}

SirFit fit_sir(const DyadTensor& y, const DirectDesign& Z,
               const InfluenceDesign& Ws, const InfluenceDesign& Wr,
               const SirOptions& opts, const PeriodMask& mask) {
  y.validate();
  check_alignment(y, Z, Ws, Wr);
  const int p = Ws.p;
  const int q = Z.q;

  FlatData data;
  auto [index, resp] = flatten(y, mask);
  data.index = std::move(index);
  data.y = std::move(resp);
  if (data.index.rows() < q + p + 1)
    fail(ErrorCode::invalid_input,
         "not enough unmasked observations to fit q + p + 1 parameters");
  data.Z = flatten_design(Z, data.index, opts.exec);

  const PredictorTensor x = lag_log_transform(y);

  VectorXd beta0 = opts.beta0.value_or(
      VectorXd::Constant(p, 1.0 / std::sqrt(static_cast<double>(p))));
  if (beta0.size() != p)
    fail(ErrorCode::dimension_mismatch, "beta0 length != p");

  SirFit best = fit_single_start(data, x, Ws, Wr, beta0, opts);
  best.multistart.logliks.push_back(best.loglik());

  if (opts.multi_start > 0) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<SirFit> fits;
    fits.push_back(best);
    for (int s = 0; s < opts.multi_start; ++s) {
      VectorXd b0(p);
      do {
        for (int k = 0; k < p; ++k) b0[k] = gauss(rng);
      } while (b0.norm() < 1e-12);
      b0.normalize();
      SirFit f = fit_single_start(data, x, Ws, Wr, b0, opts);
      fits.push_back(f);
      if (f.loglik() > best.loglik()) best = f;
    }
    MultiStartInfo info;
    info.starts = static_cast<int>(fits.size());
    double spread = 0.0;
    for (const auto& f : fits) {
      info.logliks.push_back(f.loglik());
      spread = std::max(
          spread,
          std::max((f.params.theta - best.params.theta).cwiseAbs().maxCoeff(),
                   std::max((f.params.alpha - best.params.alpha).cwiseAbs().maxCoeff(),
                            (f.params.beta - best.params.beta).cwiseAbs().maxCoeff())));
    }
    info.max_param_spread = spread;
    info.disagreement = spread > 1e-4;
    best.multistart = info;
    if (info.disagreement)
      SIR_LOG(1) << "multi-start disagreement: canonical estimates differ by "
                 << spread << " across " << info.starts << " starts";
  }

  best.mask = mask;
  return best;
}

Cube predict_mu(const ParameterSet& params, const DirectDesign& Z,
                const InfluenceDesign& Ws, const InfluenceDesign& Wr,
                const PredictorTensor& x, const PeriodMask& mask,
                kernels::Exec exec) {
  const int n = x.n;
  const int Tm = x.Tm;
  auto V = collapse_beta(x, Ws, Wr, params.beta, exec);
  Cube mu(n, Tm, std::numeric_limits<double>::quiet_NaN());
  const int p = Ws.p;
  const int q = Z.q;
  const bool par = exec == kernels::Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int m = 0; m < Tm; ++m) {
    if (mask_contains(mask, m)) continue;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        double eta = 0.0;
        for (int k = 0; k < q; ++k)
          eta += params.theta[k] * Z.cols[k].at(i, j, m);
        for (int k = 0; k < p; ++k)
          eta += params.alpha[k] * V[k].at(i, j, m);
        mu.at(i, j, m) = std::exp(eta);
      }
  }
  return mu;
}

MatrixXd predict_mu_slice(const ParameterSet& params, const DirectDesign& Z,
                          const InfluenceDesign& Ws, const InfluenceDesign& Wr,
                          const MatrixXd& x_slice, int m) {
  const int n = static_cast<int>(x_slice.rows());
  const int p = Ws.p;
  // per-covariate column of the collapsed design, same route as predict_mu
  MatrixXd R = influence_scores(Wr, params.beta, m);
  MatrixXd acc = MatrixXd::Zero(n, n);
  for (int k = 0; k < p; ++k)
    acc += params.alpha[k] * (Ws.cols[k].slice(m) * x_slice * R.transpose());
  MatrixXd mu(n, n);
  mu.setConstant(std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      double eta = acc(i, j);
      for (int k = 0; k < Z.q; ++k)
        eta += params.theta[k] * Z.cols[k].at(i, j, m);
      mu(i, j) = std::exp(eta);
    }
  return mu;
}

} // namespace sir
