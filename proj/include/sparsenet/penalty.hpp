#pragma once

#include <limits>

#include "sparsenet/arch.hpp"

namespace sparsenet {

// Sentinel weight: the group is constrained to the zero vector throughout
// optimization (the infinite-weight limit of the adaptive penalty).
inline constexpr double kFrozen = std::numeric_limits<double>::infinity();

// Weighted group-lasso penalty on first-layer columns:
//   lambda * sum_k w_k * ||first_weights.col(k)||_2
// with frozen groups pinned at zero. Plain group lasso is weights == 1.
struct PenaltySpec {
  Vector group_weights;  // length d0; each entry >= 0 or kFrozen
  double lambda = 0.0;

  static PenaltySpec group_lasso(int d0, double lambda);

  bool frozen(int k) const { return std::isinf(group_weights[k]); }
  int n_groups() const { return static_cast<int>(group_weights.size()); }
  void validate(int d0) const;
};

// Throws config_error if a frozen group has a nonzero column (contract
// violation); frozen groups contribute 0.
double penalty_value(const PenaltySpec& spec, const NetworkParams& params);

// w_k = ||base.col(k)||^-gamma for nonzero columns, kFrozen for exact-zero
// columns (the base estimator's screened groups never revive). Requires
// gamma > 0.
Vector adaptive_weights(const NetworkParams& base, double gamma);

namespace detail {
// Same formula without the gamma > 0 check; exists so the degenerate
// gamma = 0 composition can be unit-tested.
Vector adaptive_weights_unchecked(const NetworkParams& base, double gamma);
}  // namespace detail

// Block soft-threshold: the exact minimizer of
//   (1/2) ||z - column||^2 + threshold * ||z||.
// Returns an exact zero vector when ||column|| <= threshold, otherwise
// (1 - threshold/||column||) * column. Requires threshold >= 0.
Vector prox_group(const Vector& column, double threshold);

}  // namespace sparsenet
