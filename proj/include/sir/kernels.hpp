#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sir/tensor.hpp"

namespace sir::kernels {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Exec { serial, parallel };

// All kernels produce results that are independent of the thread count:
// per-slice outputs are written to disjoint slots, and reductions are
// accumulated over fixed-size row blocks that are combined in block order.
// The block structure does not depend on the schedule, so serial and
// parallel execution agree bit for bit.

constexpr long kReductionBlock = 4096;

/// Per slice m: out_m = sum_k coef[k] * cols[k]_m.
Cube combine_slices(const std::vector<Cube>& cols, const VectorXd& coef,
                    Exec exec = Exec::parallel);

/// Per slice m: out_m = A_m * X_m * B_m^T.
Cube sandwich_product(const Cube& A, const Cube& X, const Cube& B,
                      Exec exec = Exec::parallel);

/// Collapsed bilinear columns: out[k]_m = Ws[k]_m * X_m * R_m^T where
/// R = combine_slices(Wr, coef). Never materializes p x p blocks.
std::vector<Cube> collapse_columns(const Cube& X, const std::vector<Cube>& Ws,
                                   const std::vector<Cube>& Wr,
                                   const VectorXd& coef,
                                   Exec exec = Exec::parallel);

/// Transposed variant: out[k]_m = L_m * X_m * Wr[k]_m^T with
/// L = combine_slices(Ws, coef).
std::vector<Cube> collapse_columns_t(const Cube& X, const std::vector<Cube>& Ws,
                                     const std::vector<Cube>& Wr,
                                     const VectorXd& coef,
                                     Exec exec = Exec::parallel);

/// Gather design rows for the observations in `index`: out block starting at
/// column `col0` receives cubes[k].at(i,j,m) for each flat row.
void fill_design_rows(const std::vector<Cube>& cubes,
                      const ObservationIndex& index, MatrixXd& out, int col0,
                      Exec exec = Exec::parallel);

/// X^T diag(w) X via blocked deterministic reduction.
MatrixXd weighted_cross(const MatrixXd& X, const VectorXd& w,
                        Exec exec = Exec::parallel);

/// X^T r via blocked deterministic reduction.
VectorXd cross_vec(const MatrixXd& X, const VectorXd& r,
                   Exec exec = Exec::parallel);

/// sum_i f(i) over a fixed block structure; f must be pure.
double blocked_sum(long n, const std::function<double(long)>& f,
                   Exec exec = Exec::parallel);

} // namespace sir::kernels

namespace sir::ref {

// Naive single-threaded reference implementations used by tests and the
// kernel benchmark. Straight loops, no blocking.

Cube combine_slices(const std::vector<Cube>& cols, const Eigen::VectorXd& coef);
Cube sandwich_product(const Cube& A, const Cube& X, const Cube& B);
Eigen::MatrixXd weighted_cross(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& w);
Eigen::VectorXd cross_vec(const Eigen::MatrixXd& X, const Eigen::VectorXd& r);

} // namespace sir::ref
