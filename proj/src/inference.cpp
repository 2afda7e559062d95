#include "sir/inference.hpp"

#include <cmath>
#include <sstream>

#include <omp.h>

namespace sir {

namespace {

struct Accum {
  VectorXd score;
  MatrixXd hessian;
  MatrixXd s_outer;
};

// Per-period contributions are stored in disjoint slots and combined in
// period order, so the result does not depend on the thread count.
Accum accumulate(const ParameterSet& params, const SirData& data) {
  const DyadTensor& y = *data.y;
  const DirectDesign& Z = *data.Z;
  const InfluenceDesign& Ws = *data.Ws;
  const InfluenceDesign& Wr = *data.Wr;
  const int n = y.n;
  const int q = Z.q;
  const int p = Ws.p;
  const int d = q + (p - 1) + p;
  const PredictorTensor x = lag_log_transform(y);
  const ObservationIndex index(n, y.modeled_periods(), data.mask);
  const auto& periods = index.periods();
  const int M = static_cast<int>(periods.size());

  std::vector<Accum> parts(M);

#pragma omp parallel for schedule(static)
  for (int s = 0; s < M; ++s) {
    const int m = periods[s];
    Accum& a = parts[s];
    a.score = VectorXd::Zero(d);
    a.hessian = MatrixXd::Zero(d, d);
    a.s_outer = MatrixXd::Zero(d, d);

    const MatrixXd A = influence_scores(Ws, params.alpha, m);
    const MatrixXd B = influence_scores(Wr, params.beta, m);
    // dEta/dalpha_k = (Ws_k X B^T)_ij, dEta/dbeta_k = (A X Wr_k^T)_ij,
    // d2Eta/dalpha_k dbeta_l = (Ws_k X Wr_l^T)_ij
    std::vector<MatrixXd> dA(p), dB(p);
    for (int k = 0; k < p; ++k) {
      dA[k] = Ws.cols[k].slice(m) * x.values.slice(m) * B.transpose();
      dB[k] = A * x.values.slice(m) * Wr.cols[k].slice(m).transpose();
    }
    const auto cross = collapse_full_period(x, Ws, Wr, m);

    VectorXd g(d);
    MatrixXd cross_cell(p, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        double eta = 0.0;
        for (int k = 0; k < q; ++k)
          eta += params.theta[k] * Z.cols[k].at(i, j, m);
        for (int k = 0; k < p; ++k) eta += params.alpha[k] * dA[k](i, j);
        const double mu = std::exp(eta);
        const double resid = y.values.at(i, j, m + 1) - mu;

        for (int k = 0; k < q; ++k) g[k] = Z.cols[k].at(i, j, m);
        for (int k = 1; k < p; ++k) g[q + k - 1] = dA[k](i, j);
        for (int k = 0; k < p; ++k) g[q + p - 1 + k] = dB[k](i, j);

        a.score.noalias() += resid * g;
        a.s_outer.selfadjointView<Eigen::Lower>().rankUpdate(g, resid * resid);
        a.hessian.selfadjointView<Eigen::Lower>().rankUpdate(g, -mu);

        // bilinear cross block: rows alpha_2..alpha_p, cols beta_1..beta_p
        for (int k = 1; k < p; ++k)
          for (int l = 0; l < p; ++l)
            cross_cell(k, l) = cross[static_cast<size_t>(k) * p + l](i, j);
        for (int k = 1; k < p; ++k)
          for (int l = 0; l < p; ++l) {
            const double v = resid * cross_cell(k, l);
            const int row = q + k - 1;
            const int col = q + p - 1 + l;
            // keep the lower triangle consistent with rankUpdate storage
            a.hessian(col, row) += v;
          }
      }
    a.s_outer = MatrixXd(a.s_outer.selfadjointView<Eigen::Lower>());
    a.hessian = MatrixXd(a.hessian.selfadjointView<Eigen::Lower>());
  }

  Accum total;
  total.score = VectorXd::Zero(d);
  total.hessian = MatrixXd::Zero(d, d);
  total.s_outer = MatrixXd::Zero(d, d);
  for (int s = 0; s < M; ++s) {
    total.score += parts[s].score;
    total.hessian += parts[s].hessian;
    total.s_outer += parts[s].s_outer;
  }
  return total;
}

VcovResult package(const MatrixXd& H, const MatrixXd& S,
                   std::vector<std::string> names) {
  const int d = static_cast<int>(H.rows());
  const MatrixXd Hn = -0.5 * (H + H.transpose()); // negated, symmetrized
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Hn);
  const double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double floor = 1e-10 * std::max(1.0, max_eig);
  if (eig.eigenvalues().minCoeff() < floor) {
    std::ostringstream msg;
    msg << "information matrix is not invertible (minimum eigenvalue "
        << eig.eigenvalues().minCoeff() << " below floor " << floor << ")";
    fail(ErrorCode::singular_information, msg.str());
  }
  const MatrixXd Hinv =
      eig.eigenvectors() *
      eig.eigenvalues().cwiseInverse().asDiagonal() *
      eig.eigenvectors().transpose();

  VcovResult out;
  out.vcov_hessian = Hinv;
  out.vcov_sandwich = Hinv * S * Hinv;
  out.se_hessian = Hinv.diagonal().cwiseSqrt();
  out.se_sandwich = out.vcov_sandwich.diagonal().cwiseSqrt();
  if (names.empty())
    for (int k = 0; k < d; ++k) names.push_back("psi" + std::to_string(k + 1));
  out.names = std::move(names);
  return out;
}

} // namespace

std::vector<std::string> psi_names(const DirectDesign& Z,
                                   const InfluenceDesign& Ws,
                                   const InfluenceDesign& Wr) {
  std::vector<std::string> names;
  for (const auto& nm : Z.names) names.push_back("theta:" + nm);
  for (int k = 1; k < Ws.p; ++k) names.push_back("alpha:" + Ws.names[k]);
  for (int k = 0; k < Wr.p; ++k) names.push_back("beta:" + Wr.names[k]);
  return names;
}

std::pair<VectorXd, MatrixXd> score_and_hessian(const ParameterSet& params,
                                                const SirData& data) {
  Accum a = accumulate(params, data);
  return {a.score, a.hessian};
}

VcovResult compute_vcov(const SirFit& fit, const SirData& data) {
  if (!fit.converged)
    fail(ErrorCode::invalid_input,
         "compute_vcov: fit did not converge; standard errors would be "
         "meaningless");
  Accum a = accumulate(fit.params, data);
  return package(a.hessian, a.s_outer, psi_names(*data.Z, *data.Ws, *data.Wr));
}

VcovResult compute_vcov_glm(const MatrixXd& X, const VectorXd& y,
                            const VectorXd& coefficients,
                            std::vector<std::string> names) {
  const VectorXd mu = (X * coefficients).array().exp().matrix();
  const MatrixXd H = -kernels::weighted_cross(X, mu);
  const VectorXd r2 = (y - mu).array().square().matrix();
  const MatrixXd S = kernels::weighted_cross(X, r2);
  return package(H, S, std::move(names));
}

} // namespace sir
