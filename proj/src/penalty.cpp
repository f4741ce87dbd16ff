#include "sparsenet/penalty.hpp"

#include <cmath>

namespace sparsenet {

PenaltySpec PenaltySpec::group_lasso(int d0, double lambda) {
  PenaltySpec spec;
  spec.group_weights = Vector::Ones(d0);
  spec.lambda = lambda;
  spec.validate(d0);
  return spec;
}

void PenaltySpec::validate(int d0) const {
  if (static_cast<int>(group_weights.size()) != d0)
    throw config_error("penalty has " + std::to_string(group_weights.size()) +
                       " group weights for " + std::to_string(d0) + " features");
  for (int k = 0; k < n_groups(); ++k) {
    const double w = group_weights[k];
    if (std::isnan(w) || w < 0.0)
      throw config_error("group weight " + std::to_string(k) +
                         " must be >= 0 or frozen");
  }
  if (std::isnan(lambda) || lambda < 0.0 || std::isinf(lambda))
    throw config_error("lambda must be a finite nonnegative real");
}

double penalty_value(const PenaltySpec& spec, const NetworkParams& params) {
  spec.validate(params.n_groups());
  double sum = 0.0;
  for (int k = 0; k < spec.n_groups(); ++k) {
    if (spec.frozen(k)) {
      if ((params.first_weights.col(k).array() != 0.0).any())
        throw config_error("frozen group " + std::to_string(k) +
                           " has a nonzero first-layer column");
      continue;  // pinned at zero: contributes nothing
    }
    sum += spec.group_weights[k] * params.group_norm(k);
  }
  return spec.lambda * sum;
}

namespace detail {

Vector adaptive_weights_unchecked(const NetworkParams& base, double gamma) {
  Vector weights(base.n_groups());
  for (int k = 0; k < base.n_groups(); ++k) {
    const double norm = base.group_norm(k);
    if (norm == 0.0) {
      weights[k] = kFrozen;
      continue;
    }
    double w = std::pow(norm, -gamma);
    // norm^-gamma can overflow for near-threshold survivors; a finite huge
    // weight keeps the group live (it will be thresholded away) instead of
    // tripping the frozen-means-zero contract.
    if (std::isinf(w)) w = std::numeric_limits<double>::max();
    weights[k] = w;
  }
  return weights;
}

}  // namespace detail

Vector adaptive_weights(const NetworkParams& base, double gamma) {
  if (!(gamma > 0.0))
    throw config_error("gamma must be > 0, got " + std::to_string(gamma));
  return detail::adaptive_weights_unchecked(base, gamma);
}

Vector prox_group(const Vector& column, double threshold) {
  if (std::isnan(threshold) || threshold < 0.0)
    throw config_error("prox threshold must be >= 0");
  const double norm = column.norm();
  if (norm <= threshold) return Vector::Zero(column.size());
  return (1.0 - threshold / norm) * column;
}

}  // namespace sparsenet
