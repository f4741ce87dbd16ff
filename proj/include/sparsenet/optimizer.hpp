#pragma once

#include <cstdint>
#include <vector>

#include "sparsenet/data.hpp"
#include "sparsenet/penalty.hpp"

namespace sparsenet {

struct OptConfig {
  int epochs = 20000;
  double initial_step = 1e-2;
  double backtracking_factor = 0.5;   // step multiplier while the objective increases
  double backtracking_growth = 1.1;   // per-epoch regrowth, capped at initial_step
  double divergence_cap = 1e6;        // abort when any |parameter| exceeds this
  double objective_tolerance = 0.0;   // early stop on per-epoch decrease; 0 disables
  std::uint64_t seed = 0;             // parameter initialization
  // Hold output weights/bias at their initial values. Off everywhere except
  // the linear-model oracle tests: with the identity activation the output
  // layer spans a penalty-reducing rescaling orbit, and pinning it makes the
  // degenerate architecture an exact weighted group lasso on linear
  // regression.
  bool freeze_output_layer = false;

  void validate() const;
};

struct FitResult {
  NetworkParams params;
  std::vector<double> objective_trace;  // penalized objective after each epoch
  std::vector<bool> support;            // group_norms[k] > 0.0, exact
  Vector group_norms;
  int epochs_run = 0;
  bool converged_early = false;
};

// Entries i.i.d. uniform on [-r, r], r = 1/sqrt(fan-in) per layer, from a
// counter-based stream seeded by `seed`. Frozen columns of `spec` (if given)
// are set to exact zero; the stream is consumed identically either way.
NetworkParams initialize_params(const NetworkArch& arch, std::uint64_t seed,
                                const PenaltySpec* spec = nullptr);

// Deterministic full-batch proximal gradient descent on
//   empirical_risk + penalty_value.
// Per epoch: one exact gradient, a step on all unpenalized parameters, a
// step + block soft-threshold (threshold step*lambda*w_k) on each non-frozen
// first-layer column, frozen columns held at exact zero, and backtracking
// that shrinks the step until the penalized objective does not increase.
// Throws divergence_error (with the epoch index) when a parameter passes
// divergence_cap or the objective turns non-finite.
FitResult fit(const NetworkArch& arch, const Dataset& data,
              const PenaltySpec& spec, const OptConfig& config,
              const NetworkParams* init = nullptr);

}  // namespace sparsenet
