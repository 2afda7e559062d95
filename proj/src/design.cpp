#include "sir/design.hpp"

namespace sir {

namespace {

void check_dims(const PredictorTensor& x, const InfluenceDesign& Ws,
                const InfluenceDesign& Wr, const VectorXd& coef) {
  if (Ws.p == 0 || Wr.p == 0)
    fail(ErrorCode::invalid_input, "influence design has no covariates");
  if (Ws.p != Wr.p)
    fail(ErrorCode::dimension_mismatch,
         "sender and receiver influence designs disagree on p");
  if (coef.size() != Ws.p)
    fail(ErrorCode::dimension_mismatch, "influence coefficient length != p");
  if (!coef.allFinite())
    fail(ErrorCode::invalid_input, "influence coefficients must be finite");
  if (Ws.n() != x.n || Wr.n() != x.n || Ws.Tm() != x.Tm || Wr.Tm() != x.Tm)
    fail(ErrorCode::dimension_mismatch,
         "influence design shape does not match predictor tensor");
}

} // namespace

void DirectDesign::validate() const {
  if (q != static_cast<int>(cols.size()) || q != static_cast<int>(names.size()))
    fail(ErrorCode::invalid_input, "DirectDesign: q does not match layers");
  for (int k = 0; k < q; ++k) {
    const Cube& c = cols[k];
    for (int m = 0; m < c.slices(); ++m)
      for (int j = 0; j < c.n(); ++j)
        for (int i = 0; i < c.n(); ++i) {
          if (i == j) continue;
          if (!std::isfinite(c.at(i, j, m)))
            fail(ErrorCode::invalid_input,
                 "DirectDesign covariate '" + names[k] + "' has a non-finite cell");
          if (intercept && k == 0 && c.at(i, j, m) != 1.0)
            fail(ErrorCode::invalid_input,
                 "DirectDesign intercept column is not all ones");
        }
  }
}

void InfluenceDesign::validate() const {
  if (p != static_cast<int>(cols.size()) || p != static_cast<int>(names.size()))
    fail(ErrorCode::invalid_input, "InfluenceDesign: p does not match layers");
  for (int k = 0; k < p; ++k) {
    const Cube& c = cols[k];
    for (size_t idx = 0; idx < c.data().size(); ++idx)
      if (!std::isfinite(c.data()[idx]))
        fail(ErrorCode::invalid_input,
             "InfluenceDesign covariate '" + names[k] +
                 "' has a non-finite cell (self-pairs must be defined)");
  }
}

std::vector<Cube> collapse_beta(const PredictorTensor& x,
                                const InfluenceDesign& Ws,
                                const InfluenceDesign& Wr, const VectorXd& beta,
                                kernels::Exec exec) {
  check_dims(x, Ws, Wr, beta);
  return kernels::collapse_columns(x.values, Ws.cols, Wr.cols, beta, exec);
}

std::vector<Cube> collapse_alpha(const PredictorTensor& x,
                                 const InfluenceDesign& Ws,
                                 const InfluenceDesign& Wr,
                                 const VectorXd& alpha, kernels::Exec exec) {
  check_dims(x, Ws, Wr, alpha);
  return kernels::collapse_columns_t(x.values, Ws.cols, Wr.cols, alpha, exec);
}

MatrixXd collapse_full(const PredictorTensor& x, const InfluenceDesign& Ws,
                       const InfluenceDesign& Wr, int i, int j, int m) {
  const int p = Ws.p;
  MatrixXd out(p, p);
  // X~_kl(i,j) = (row i of Ws_k) X_m (row j of Wr_l)^T
  for (int l = 0; l < p; ++l) {
    VectorXd h = x.values.slice(m) * Wr.cols[l].slice(m).row(j).transpose();
    for (int k = 0; k < p; ++k) out(k, l) = Ws.cols[k].slice(m).row(i) * h;
  }
  return out;
}

std::vector<MatrixXd> collapse_full_period(const PredictorTensor& x,
                                           const InfluenceDesign& Ws,
                                           const InfluenceDesign& Wr, int m) {
  const int p = Ws.p;
  std::vector<MatrixXd> out(static_cast<size_t>(p) * p);
  for (int k = 0; k < p; ++k) {
    const MatrixXd left = Ws.cols[k].slice(m) * x.values.slice(m);
    for (int l = 0; l < p; ++l)
      out[static_cast<size_t>(k) * p + l] =
          left * Wr.cols[l].slice(m).transpose();
  }
  return out;
}

MatrixXd influence_scores(const InfluenceDesign& W, const VectorXd& coef,
                          int m) {
  if (coef.size() != W.p)
    fail(ErrorCode::dimension_mismatch, "influence_scores: coef length != p");
  if (m < 0 || m >= W.Tm())
    fail(ErrorCode::invalid_input, "influence_scores: period out of range");
  MatrixXd out = MatrixXd::Zero(W.n(), W.n());
  for (int k = 0; k < W.p; ++k) out += coef[k] * W.cols[k].slice(m);
  return out;
}

MatrixXd flatten_design(const DirectDesign& Z, const ObservationIndex& index,
                        kernels::Exec exec) {
  MatrixXd out(index.rows(), Z.q);
  kernels::fill_design_rows(Z.cols, index, out, 0, exec);
  return out;
}

} // namespace sir
