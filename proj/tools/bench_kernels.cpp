// Timing comparison of the OpenMP kernels against the naive serial reference
// and the blocked serial path. Usage: sirnet_bench [n] [T] [p] [reps]
#include <chrono>
#include <cstdio>
#include <random>

#include <omp.h>

#include "sir/kernels.hpp"

using namespace sir;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class F> double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    f();
    best = std::min(best, seconds_since(start));
  }
  return best;
}

} // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 60;
  const int T = argc > 2 ? std::atoi(argv[2]) : 80;
  const int p = argc > 3 ? std::atoi(argv[3]) : 4;
  const int reps = argc > 4 ? std::atoi(argv[4]) : 3;

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Cube X(n, T);
  for (double& v : X.data()) v = std::abs(gauss(rng));
  std::vector<Cube> W(p, Cube(n, T));
  for (auto& c : W)
    for (double& v : c.data()) v = gauss(rng);
  Eigen::VectorXd coef(p);
  for (int k = 0; k < p; ++k) coef[k] = gauss(rng);

  const long N = static_cast<long>(n) * (n - 1) * T;
  const int d = 8;
  Eigen::MatrixXd D(N, d);
  Eigen::VectorXd w(N);
  for (long r = 0; r < N; ++r) {
    for (int c = 0; c < d; ++c) D(r, c) = gauss(rng);
    w[r] = std::abs(gauss(rng)) + 0.1;
  }

  std::printf("sirnet kernel benchmark: n=%d T=%d p=%d threads=%d\n", n, T, p,
              omp_get_max_threads());
  std::printf("%-22s %12s %12s %12s %9s\n", "kernel", "naive(s)", "serial(s)",
              "parallel(s)", "speedup");

  {
    const double t_naive =
        time_best_of(reps, [&] { (void)ref::sandwich_product(X, X, X); });
    const double t_serial = time_best_of(reps, [&] {
      (void)kernels::sandwich_product(X, X, X, kernels::Exec::serial);
    });
    const double t_par = time_best_of(reps, [&] {
      (void)kernels::sandwich_product(X, X, X, kernels::Exec::parallel);
    });
    std::printf("%-22s %12.4f %12.4f %12.4f %8.2fx\n", "sandwich_product",
                t_naive, t_serial, t_par, t_serial / t_par);
  }
  {
    const double t_naive =
        time_best_of(reps, [&] { (void)ref::combine_slices(W, coef); });
    const double t_serial = time_best_of(reps, [&] {
      (void)kernels::combine_slices(W, coef, kernels::Exec::serial);
    });
    const double t_par = time_best_of(reps, [&] {
      (void)kernels::combine_slices(W, coef, kernels::Exec::parallel);
    });
    std::printf("%-22s %12.4f %12.4f %12.4f %8.2fx\n", "combine_slices",
                t_naive, t_serial, t_par, t_serial / t_par);
  }
  {
    const double t_serial = time_best_of(reps, [&] {
      (void)kernels::collapse_columns(X, W, W, coef, kernels::Exec::serial);
    });
    const double t_par = time_best_of(reps, [&] {
      (void)kernels::collapse_columns(X, W, W, coef, kernels::Exec::parallel);
    });
    std::printf("%-22s %12s %12.4f %12.4f %8.2fx\n", "collapse_columns", "-",
                t_serial, t_par, t_serial / t_par);
  }
  {
    const double t_naive =
        time_best_of(reps, [&] { (void)ref::weighted_cross(D, w); });
    const double t_serial = time_best_of(reps, [&] {
      (void)kernels::weighted_cross(D, w, kernels::Exec::serial);
    });
    const double t_par = time_best_of(reps, [&] {
      (void)kernels::weighted_cross(D, w, kernels::Exec::parallel);
    });
    std::printf("%-22s %12.4f %12.4f %12.4f %8.2fx\n", "weighted_cross",
                t_naive, t_serial, t_par, t_serial / t_par);
  }
  {
    const double t_naive =
        time_best_of(reps, [&] { (void)ref::cross_vec(D, w); });
    const double t_serial = time_best_of(
        reps, [&] { (void)kernels::cross_vec(D, w, kernels::Exec::serial); });
    const double t_par = time_best_of(
        reps, [&] { (void)kernels::cross_vec(D, w, kernels::Exec::parallel); });
    std::printf("%-22s %12.4f %12.4f %12.4f %8.2fx\n", "cross_vec", t_naive,
                t_serial, t_par, t_serial / t_par);
  }
  return 0;
}
