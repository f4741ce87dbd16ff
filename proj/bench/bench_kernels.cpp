// Timing comparison between the serial per-sample reference and the blocked
// OpenMP kernels, at the shapes the experiments actually run.
#include <chrono>
#include <functional>
#include <cstdio>
#include <string>
#include <vector>

#include "sparsenet/kernels.hpp"
#include "sparsenet/optimizer.hpp"
#include "sparsenet/reference.hpp"
#include "sparsenet/testing.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

using namespace sparsenet;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(int reps, const std::function<void()>& body) {
  // one warmup, then the best of three timed runs
  body();
  double best = 1e300;
  for (int t = 0; t < 3; ++t) {
    const auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) body();
    const auto t1 = clock_type::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0)
                              .count() /
                              reps);
  }
  return best;
}

void set_threads(int n) {
#if defined(_OPENMP)
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace

int main() {
  struct Case {
    std::string name;
    std::vector<int> widths;
    int n;
  };
  const std::vector<Case> cases = {
      {"synthetic-small", {20, 10, 10, 10, 1}, 2000},
      {"synthetic-large", {50, 20, 20, 20, 1}, 5000},
      {"housing+noise", {26, 10, 10, 10, 1}, 506},
  };
  const int threads = max_threads();
  std::printf("%-18s %8s %14s %14s %14s %10s\n", "case", "n", "reference(ms)",
              "blocked x1(ms)", "blocked xN(ms)", "speedup");

  for (const auto& c : cases) {
    NetworkArch arch{c.widths, Activation::kTanh};
    SplitMix64 rng(1);
    const NetworkParams params = testing::random_params(arch, rng, 0.5);
    const Dataset data = testing::random_dataset(c.n, arch.input_width(), rng);
    NetworkParams grad;
    kernels::BatchCache cache;
    std::vector<kernels::BlockScratch> scratch;

    const int reps = std::max(1, 2000000 / c.n);
    const double t_ref = time_ms(std::max(1, reps / 20), [&] {
      reference::risk_gradient(arch, params, data.X, data.Y);
    });
    const auto one_pass = [&] {
      kernels::risk(arch, params, data.X, data.Y, &cache);
      kernels::gradient_from_cache(arch, params, data.X, data.Y, cache,
                                   scratch, grad);
    };
    set_threads(1);
    const double t_one = time_ms(reps, one_pass);
    set_threads(threads);
    const double t_many = time_ms(reps, one_pass);
    std::printf("%-18s %8d %14.3f %14.3f %14.3f %9.1fx\n", c.name.c_str(), c.n,
                t_ref, t_one, t_many, t_ref / t_many);
  }

  // one short penalized fit, the unit the experiments are made of
  {
    NetworkArch arch{{20, 10, 10, 10, 1}, Activation::kTanh};
    SyntheticConfig gen;
    gen.arch = arch;
    gen.n_features = 20;
    gen.n_significant = 5;
    gen.n_samples = 2000;
    gen.seed = 3;
    const Dataset data = gen_synthetic(gen).data;
    OptConfig opt;
    opt.epochs = 1000;
    const auto t0 = clock_type::now();
    const FitResult res =
        fit(arch, data, PenaltySpec::group_lasso(20, 0.1), opt);
    const auto t1 = clock_type::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::printf("\nfit n=2000 widths=[20,10,10,10,1]: %.0f ms / 1000 epochs "
                "(%.1f us/epoch, %d threads)\n",
                ms, ms, threads);
    (void)res;
  }
  return 0;
}
