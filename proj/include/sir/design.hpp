#pragma once

#include <string>
#include <vector>

#include "sir/kernels.hpp"
#include "sir/tensor.hpp"

namespace sir {

/// Direct-effect design: q covariate layers over off-diagonal modeled cells.
/// Column 0 is the all-ones intercept when `intercept` is set.
struct DirectDesign {
  int q = 0;
  bool intercept = false;
  std::vector<std::string> names;
  std::vector<Cube> cols; // q cubes, each n x n x (T-1)

  int n() const { return cols.empty() ? 0 : cols[0].n(); }
  int Tm() const { return cols.empty() ? 0 : cols[0].slices(); }
  void validate() const;
};

enum class InfluenceSide { sender, receiver };

/// Influence design: entry (i, i', m) of layer k is the k-th covariate of the
/// ordered pair (i, i') at modeled period m. Self-pairs (i == i') are defined;
/// they carry the autoregressive channel.
struct InfluenceDesign {
  int p = 0;
  InfluenceSide side = InfluenceSide::sender;
  std::vector<std::string> names;
  std::vector<Cube> cols; // p cubes, each n x n x (T-1)

  int n() const { return cols.empty() ? 0 : cols[0].n(); }
  int Tm() const { return cols.empty() ? 0 : cols[0].slices(); }
  void validate() const;
};

// The collapsed design is X~_ijt = sum_{i' != j'} x_{i'j't} w_{ii't} w_{jj't}^T.
// With B_t = [beta^T w_{jj't}]_{j,j'} the k-th coordinate of X~_ijt beta equals
// (Ws_k,t X_t B_t^T)_{ij}, so each column is one triple matrix product per
// period: O(p n^3 T) total, no p x p blocks. The diagonal of X_t is 0, which
// removes the i' == j' terms from the sum.

/// X~_ijt beta for every off-diagonal cell; result[k].at(i,j,m) is coordinate k.
std::vector<Cube> collapse_beta(const PredictorTensor& x,
                                const InfluenceDesign& Ws,
                                const InfluenceDesign& Wr, const VectorXd& beta,
                                kernels::Exec exec = kernels::Exec::parallel);

/// X~_ijt^T alpha, the transposed half-step companion.
std::vector<Cube> collapse_alpha(const PredictorTensor& x,
                                 const InfluenceDesign& Ws,
                                 const InfluenceDesign& Wr,
                                 const VectorXd& alpha,
                                 kernels::Exec exec = kernels::Exec::parallel);

/// Explicit p x p collapsed matrix for one cell; used by inference and tests.
MatrixXd collapse_full(const PredictorTensor& x, const InfluenceDesign& Ws,
                       const InfluenceDesign& Wr, int i, int j, int m);

/// All p^2 cross products (Ws_k,m X_m Wr_l,m^T) for one period; entry
/// [k*p + l] holds the (k,l) layer. Used by the inference accumulator.
std::vector<MatrixXd> collapse_full_period(const PredictorTensor& x,
                                           const InfluenceDesign& Ws,
                                           const InfluenceDesign& Wr, int m);

/// Influence matrix at period m: entry (i, i') = coef^T w_{ii'm}.
MatrixXd influence_scores(const InfluenceDesign& W, const VectorXd& coef,
                          int m);

/// Design rows for the observations in `index` (N x q matrix).
MatrixXd flatten_design(const DirectDesign& Z, const ObservationIndex& index,
                        kernels::Exec exec = kernels::Exec::parallel);

} // namespace sir
