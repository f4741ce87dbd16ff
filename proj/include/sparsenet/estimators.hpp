#pragma once

#include <optional>
#include <utility>

#include "sparsenet/optimizer.hpp"

namespace sparsenet {

enum class Method { kGroupLasso, kGroupLassoAdaptive };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct SelectConfig {
  double gamma = 2.0;
  std::vector<double> lambda_grid = {0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 2.0};
  std::vector<double> zeta_grid = {0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 2.0};
  int n_splits = 3;
  double test_fraction = 1.0 / 3.0;
  OptConfig opt;
  std::uint64_t seed = 0;

  void validate() const;
};

// Group lasso with unit weights at regularization `lambda`; initialization
// from initialize_params(arch, config.seed).
FitResult fit_group_lasso(const NetworkArch& arch, const Dataset& data,
                          double lambda, const SelectConfig& config);

struct TwoStageFit {
  FitResult base;   // stage 1: plain group lasso
  FitResult final;  // stage 2: adaptive weights from the base estimate
};

// Stage 1 at `lambda`, then a fresh fit with weights
// ||base col||^-gamma (frozen where the base column is exactly zero) at
// regularization `zeta`. Stage 2 starts from a fresh random draw (seed
// derived from config.seed), never a warm start.
TwoStageFit fit_gl_agl(const NetworkArch& arch, const Dataset& data,
                       double lambda, double zeta, const SelectConfig& config);

struct GridEntry {
  double value;
  double mean_test_mse;
};

struct GridSelection {
  double lambda = 0.0;
  std::optional<double> zeta;
  std::vector<GridEntry> lambda_errors;
  std::vector<GridEntry> zeta_errors;
};

// Average held-out MSE over n_splits seeded splits, one split set shared
// across the whole grid; ties break toward the larger (sparser) constant.
// For the two-stage method, lambda is chosen first by the plain-GL sweep and
// zeta is then swept with per-split adaptive weights built from the chosen
// lambda's split fits.
GridSelection grid_select(const NetworkArch& arch, const Dataset& data,
                          Method method, const SelectConfig& config);

// The fit's exact-zero support, verbatim; never applies a tolerance.
const std::vector<bool>& selected_support(const FitResult& fit);

}  // namespace sparsenet
