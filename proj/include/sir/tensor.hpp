#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sir/errors.hpp"

namespace sir {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using MatMap = Eigen::Map<MatrixXd>;
using ConstMatMap = Eigen::Map<const MatrixXd>;

// n x n x S stack of square slices, column-major within each slice.
class Cube {
public:
  Cube() = default;
  Cube(int n, int slices, double fill = 0.0)
      : n_(n), s_(slices), v_(static_cast<size_t>(n) * n * slices, fill) {}

  int n() const { return n_; }
  int slices() const { return s_; }

  double& at(int i, int j, int s) { return v_[idx(i, j, s)]; }
  double at(int i, int j, int s) const { return v_[idx(i, j, s)]; }

  MatMap slice(int s) {
    return MatMap(v_.data() + static_cast<size_t>(s) * n_ * n_, n_, n_);
  }
  ConstMatMap slice(int s) const {
    return ConstMatMap(v_.data() + static_cast<size_t>(s) * n_ * n_, n_, n_);
  }

  const std::vector<double>& data() const { return v_; }
  std::vector<double>& data() { return v_; }

  bool same_shape(const Cube& o) const { return n_ == o.n_ && s_ == o.s_; }

private:
  size_t idx(int i, int j, int s) const {
    return (static_cast<size_t>(s) * n_ + j) * n_ + i;
  }
  int n_ = 0;
  int s_ = 0;
  std::vector<double> v_;
};

// Set of modeled-period indices (0-based, in [0, T-2]) excluded from fitting.
// The same mechanism represents CV folds, temporal holdouts and missing slices.
using PeriodMask = std::vector<int>;

inline bool mask_contains(const PeriodMask& mask, int m) {
  for (int x : mask)
    if (x == m) return true;
  return false;
}

/// Longitudinal dyadic count array. Diagonal cells are structurally missing
/// and stored as NaN so accidental use poisons results visibly.
struct DyadTensor {
  int n = 0;
  int T = 0;
  Cube values; // n x n x T, diagonal NaN
  std::vector<std::string> actor_labels;
  std::vector<std::string> period_labels;

  DyadTensor() = default;
  DyadTensor(int n_actors, int periods,
             std::vector<std::string> actors = {},
             std::vector<std::string> labels = {});

  double at(int i, int j, int t) const { return values.at(i, j, t); }
  double& cell(int i, int j, int t);

  // Number of modeled periods (responses are slices 1..T-1).
  int modeled_periods() const { return T - 1; }

  void validate() const;
};

/// log(y_{t-1}+1) slices; slice m predicts response slice m+1 of the source
/// tensor. Diagonal entries are exactly 0 so bilinear sums over all pairs
/// silently skip them.
struct PredictorTensor {
  int n = 0;
  int Tm = 0; // T-1 slices
  Cube values;
};

// Flat enumeration of off-diagonal modeled cells, ordered period-major,
// then sender i, then receiver j. Masked periods are dropped.
class ObservationIndex {
public:
  ObservationIndex() = default;
  ObservationIndex(int n, int modeled_periods, const PeriodMask& mask = {});

  int n() const { return n_; }
  long rows() const { return static_cast<long>(periods_.size()) * n_ * (n_ - 1); }
  const std::vector<int>& periods() const { return periods_; }

  // Decode flat row r into (i, j, m) with m a modeled-period index.
  void decode(long r, int& i, int& j, int& m) const;

private:
  int n_ = 0;
  std::vector<int> periods_; // included modeled periods, ascending
};

DyadTensor make_dyad_tensor(int n, int T,
                            std::vector<std::string> actors = {},
                            std::vector<std::string> periods = {});

/// Lag/log predictor transform: slice m of the result is log(y_m + 1).
PredictorTensor lag_log_transform(const DyadTensor& y);

/// Flatten responses over unmasked modeled periods in ObservationIndex order.
std::pair<ObservationIndex, VectorXd> flatten(const DyadTensor& y,
                                              const PeriodMask& mask = {});

/// Inverse of flatten: write values back into the modeled slices of `into`.
void unflatten(const ObservationIndex& index, const VectorXd& resp,
               DyadTensor& into);

} // namespace sir
