#include "sir/tensor.hpp"

#include <algorithm>

namespace sir {

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}

DyadTensor::DyadTensor(int n_actors, int periods,
                       std::vector<std::string> actors,
                       std::vector<std::string> labels)
    : n(n_actors), T(periods), values(n_actors, periods, 0.0),
      actor_labels(std::move(actors)), period_labels(std::move(labels)) {
  if (n < 2) fail(ErrorCode::invalid_input, "DyadTensor needs n >= 2 actors");
  if (T < 2) fail(ErrorCode::insufficient_periods, "DyadTensor needs T >= 2 periods");
  if (actor_labels.empty()) {
    actor_labels.resize(n);
    for (int i = 0; i < n; ++i) actor_labels[i] = "a" + std::to_string(i + 1);
  }
  if (period_labels.empty()) {
    period_labels.resize(T);
    for (int t = 0; t < T; ++t) period_labels[t] = "t" + std::to_string(t + 1);
  }
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) values.at(i, i, t) = kNaN;
}

double& DyadTensor::cell(int i, int j, int t) {
  if (i == j)
    fail(ErrorCode::invalid_input, "diagonal cells are structurally missing");
  return values.at(i, j, t);
}

void DyadTensor::validate() const {
  if (n < 2 || T < 2)
    fail(ErrorCode::invalid_input, "DyadTensor dimensions invalid");
  if (static_cast<int>(actor_labels.size()) != n ||
      static_cast<int>(period_labels.size()) != T)
    fail(ErrorCode::invalid_input, "DyadTensor label lengths do not match dimensions");
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        double v = values.at(i, j, t);
        if (!std::isfinite(v) || v < 0.0)
          fail(ErrorCode::invalid_input,
               "off-diagonal entry (" + std::to_string(i) + "," +
                   std::to_string(j) + "," + std::to_string(t) +
                   ") is not a finite nonnegative value");
      }
}

DyadTensor make_dyad_tensor(int n, int T, std::vector<std::string> actors,
                            std::vector<std::string> periods) {
  return DyadTensor(n, T, std::move(actors), std::move(periods));
}

PredictorTensor lag_log_transform(const DyadTensor& y) {
  if (y.T < 2)
    fail(ErrorCode::insufficient_periods,
         "lag_log_transform needs at least 2 periods");
  PredictorTensor x;
  x.n = y.n;
  x.Tm = y.T - 1;
  x.values = Cube(y.n, y.T - 1, 0.0);
  for (int m = 0; m < x.Tm; ++m)
    for (int j = 0; j < y.n; ++j)
      for (int i = 0; i < y.n; ++i) {
        if (i == j) continue; // diagonal stays 0
        x.values.at(i, j, m) = std::log1p(y.values.at(i, j, m));
      }
  return x;
}

ObservationIndex::ObservationIndex(int n, int modeled_periods,
                                   const PeriodMask& mask)
    : n_(n) {
  for (int m : mask)
    if (m < 0 || m >= modeled_periods)
      fail(ErrorCode::invalid_input,
           "mask period " + std::to_string(m) + " outside modeled range");
  periods_.reserve(modeled_periods);
  for (int m = 0; m < modeled_periods; ++m)
    if (!mask_contains(mask, m)) periods_.push_back(m);
}

void ObservationIndex::decode(long r, int& i, int& j, int& m) const {
  const long per_period = static_cast<long>(n_) * (n_ - 1);
  m = periods_[static_cast<size_t>(r / per_period)];
  long rem = r % per_period;
  i = static_cast<int>(rem / (n_ - 1));
  int jj = static_cast<int>(rem % (n_ - 1));
  j = jj >= i ? jj + 1 : jj; // skip the diagonal slot
}

std::pair<ObservationIndex, VectorXd> flatten(const DyadTensor& y,
                                              const PeriodMask& mask) {
  ObservationIndex index(y.n, y.modeled_periods(), mask);
  VectorXd resp(index.rows());
  long r = 0;
  for (int m : index.periods()) {
    const int t = m + 1; // response slice
    for (int i = 0; i < y.n; ++i)
      for (int j = 0; j < y.n; ++j) {
        if (i == j) continue;
        resp[r++] = y.values.at(i, j, t);
      }
  }
  return {std::move(index), std::move(resp)};
}

void unflatten(const ObservationIndex& index, const VectorXd& resp,
               DyadTensor& into) {
  if (resp.size() != index.rows())
    fail(ErrorCode::dimension_mismatch, "unflatten: response length mismatch");
  if (into.n != index.n())
    fail(ErrorCode::dimension_mismatch, "unflatten: actor count mismatch");
  for (long r = 0; r < resp.size(); ++r) {
    int i, j, m;
    index.decode(r, i, j, m);
    into.values.at(i, j, m + 1) = resp[r];
  }
}

} // namespace sir
