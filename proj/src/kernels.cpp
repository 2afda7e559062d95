#include "sir/kernels.hpp"

#include <omp.h>

namespace sir::kernels {

namespace {

inline long block_count(long n) {
  return (n + kReductionBlock - 1) / kReductionBlock;
}

} // namespace

Cube combine_slices(const std::vector<Cube>& cols, const VectorXd& coef,
                    Exec exec) {
  if (cols.empty() || coef.size() != static_cast<long>(cols.size()))
    fail(ErrorCode::dimension_mismatch, "combine_slices: coef length mismatch");
  const int n = cols[0].n();
  const int S = cols[0].slices();
  Cube out(n, S, 0.0);
  const int K = static_cast<int>(cols.size());
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int m = 0; m < S; ++m) {
    auto o = out.slice(m);
    for (int k = 0; k < K; ++k) o.noalias() += coef[k] * cols[k].slice(m);
  }
  return out;
}

Cube sandwich_product(const Cube& A, const Cube& X, const Cube& B, Exec exec) {
  if (!A.same_shape(X) || !B.same_shape(X))
    fail(ErrorCode::dimension_mismatch, "sandwich_product: shape mismatch");
  const int S = X.slices();
  Cube out(X.n(), S, 0.0);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int m = 0; m < S; ++m)
    out.slice(m).noalias() = A.slice(m) * X.slice(m) * B.slice(m).transpose();
  return out;
}

std::vector<Cube> collapse_columns(const Cube& X, const std::vector<Cube>& Ws,
                                   const std::vector<Cube>& Wr,
                                   const VectorXd& coef, Exec exec) {
  const Cube R = combine_slices(Wr, coef, exec);
  const int p = static_cast<int>(Ws.size());
  const int S = X.slices();
  std::vector<Cube> out(p, Cube(X.n(), S, 0.0));
  const bool par = exec == Exec::parallel;
#pragma omp parallel for collapse(2) schedule(static) if (par)
  for (int k = 0; k < p; ++k)
    for (int m = 0; m < S; ++m)
      out[k].slice(m).noalias() =
          Ws[k].slice(m) * X.slice(m) * R.slice(m).transpose();
  return out;
}

std::vector<Cube> collapse_columns_t(const Cube& X, const std::vector<Cube>& Ws,
                                     const std::vector<Cube>& Wr,
                                     const VectorXd& coef, Exec exec) {
  const Cube L = combine_slices(Ws, coef, exec);
  const int p = static_cast<int>(Wr.size());
  const int S = X.slices();
  std::vector<Cube> out(p, Cube(X.n(), S, 0.0));
  const bool par = exec == Exec::parallel;
#pragma omp parallel for collapse(2) schedule(static) if (par)
  for (int k = 0; k < p; ++k)
    for (int m = 0; m < S; ++m)
      out[k].slice(m).noalias() =
          L.slice(m) * X.slice(m) * Wr[k].slice(m).transpose();
  return out;
}

void fill_design_rows(const std::vector<Cube>& cubes,
                      const ObservationIndex& index, MatrixXd& out, int col0,
                      Exec exec) {
  const long N = index.rows();
  const int K = static_cast<int>(cubes.size());
  if (out.rows() != N || out.cols() < col0 + K)
    fail(ErrorCode::dimension_mismatch, "fill_design_rows: output shape mismatch");
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (long r = 0; r < N; ++r) {
    int i, j, m;
    index.decode(r, i, j, m);
    for (int k = 0; k < K; ++k) out(r, col0 + k) = cubes[k].at(i, j, m);
  }
}

MatrixXd weighted_cross(const MatrixXd& X, const VectorXd& w, Exec exec) {
  const long N = X.rows();
  const int d = static_cast<int>(X.cols());
  if (w.size() != N)
    fail(ErrorCode::dimension_mismatch, "weighted_cross: weight length mismatch");
  const long B = block_count(N);
  std::vector<MatrixXd> partial(B, MatrixXd::Zero(d, d));
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (long b = 0; b < B; ++b) {
    const long lo = b * kReductionBlock;
    const long hi = std::min(N, lo + kReductionBlock);
    MatrixXd& acc = partial[b];
    for (long r = lo; r < hi; ++r)
      acc.selfadjointView<Eigen::Lower>().rankUpdate(X.row(r).transpose(), w[r]);
  }
  MatrixXd total = MatrixXd::Zero(d, d);
  for (long b = 0; b < B; ++b) total += partial[b];
  return total.selfadjointView<Eigen::Lower>();
}

VectorXd cross_vec(const MatrixXd& X, const VectorXd& r, Exec exec) {
  const long N = X.rows();
  const int d = static_cast<int>(X.cols());
  if (r.size() != N)
    fail(ErrorCode::dimension_mismatch, "cross_vec: length mismatch");
  const long B = block_count(N);
  std::vector<VectorXd> partial(B, VectorXd::Zero(d));
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (long b = 0; b < B; ++b) {
    const long lo = b * kReductionBlock;
    const long hi = std::min(N, lo + kReductionBlock);
    partial[b].noalias() =
        X.middleRows(lo, hi - lo).transpose() * r.segment(lo, hi - lo);
  }
  VectorXd total = VectorXd::Zero(d);
  for (long b = 0; b < B; ++b) total += partial[b];
  return total;
}

double blocked_sum(long n, const std::function<double(long)>& f, Exec exec) {
  const long B = block_count(n);
  std::vector<double> partial(B, 0.0);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (long b = 0; b < B; ++b) {
    const long lo = b * kReductionBlock;
    const long hi = std::min(n, lo + kReductionBlock);
    double acc = 0.0;
    for (long i = lo; i < hi; ++i) acc += f(i);
    partial[b] = acc;
  }
  double total = 0.0;
  for (long b = 0; b < B; ++b) total += partial[b];
  return total;
}

} // namespace sir::kernels

namespace sir::ref {

Cube combine_slices(const std::vector<Cube>& cols, const Eigen::VectorXd& coef) {
  const int n = cols[0].n();
  const int S = cols[0].slices();
  Cube out(n, S, 0.0);
  for (int m = 0; m < S; ++m)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (size_t k = 0; k < cols.size(); ++k)
          acc += coef[static_cast<long>(k)] * cols[k].at(i, j, m);
        out.at(i, j, m) = acc;
      }
  return out;
}

Cube sandwich_product(const Cube& A, const Cube& X, const Cube& B) {
  const int n = X.n();
  const int S = X.slices();
  Cube out(n, S, 0.0);
  for (int m = 0; m < S; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            acc += A.at(i, a, m) * X.at(a, b, m) * B.at(j, b, m);
        out.at(i, j, m) = acc;
      }
  return out;
}

Eigen::MatrixXd weighted_cross(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& w) {
  const int d = static_cast<int>(X.cols());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (long r = 0; r < X.rows(); ++r)
    out += w[r] * X.row(r).transpose() * X.row(r);
  return out;
}

Eigen::VectorXd cross_vec(const Eigen::MatrixXd& X, const Eigen::VectorXd& r) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(X.cols());
  for (long i = 0; i < X.rows(); ++i) out += r[i] * X.row(i).transpose();
  return out;
}

} // namespace sir::ref
