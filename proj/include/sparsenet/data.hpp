#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsenet/arch.hpp"

namespace sparsenet {

struct Dataset {
  Matrix X;                                       // n x d0
  Vector Y;                                       // n
  std::vector<std::string> feature_names;         // d0
  std::optional<std::vector<bool>> true_support;  // d0, when known

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index n_features() const { return X.cols(); }
  void validate() const;
};

struct SyntheticConfig {
  NetworkArch arch;  // generating network; arch.input_width() == n_features
  int n_features = 50;
  int n_significant = 10;
  int n_samples = 5000;
  double noise_sd = 1.0;
  double input_low = -1.0;
  double input_high = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  Dataset data;
  NetworkParams true_params;
  Vector noise;  // retained so Y reconstructs as f(X) + noise
};

// Draws all generating weights i.i.d. N(0,1), zeroes the first-layer columns
// of the trailing n_features - n_significant inputs, samples X uniformly on
// (input_low, input_high)^d0 and sets Y = f(X) + N(0, noise_sd^2).
// true_support marks the leading n_significant features. Deterministic in
// config.seed.
SyntheticData gen_synthetic(const SyntheticConfig& config);

// UTF-8, comma-separated, header row, decimal-point floats, no quoting.
// Every non-response column becomes a feature in file order; a row with a
// missing or non-numeric cell fails with a row-indexed error.
Dataset load_csv(const std::string& path, const std::string& response_column);

void write_csv(const Dataset& data, const std::string& response_name,
               const std::string& path);

// Appends k i.i.d. standard-normal columns named noise_1..noise_k; original
// columns are untouched bitwise and true_support (if any) is extended with
// k false entries.
Dataset augment_noise_features(const Dataset& data, int k, std::uint64_t seed);

struct StandardizeTransform {
  Vector means;
  Vector scales;
  Matrix invert(const Matrix& standardized) const;
};

// Centers each feature and scales to unit standard deviation (population, n
// denominator); constant columns are centered and given scale 1. The
// response is untouched.
std::pair<Dataset, StandardizeTransform> standardize(const Dataset& data);

// Seeded uniform permutation; test size = max(1, floor(n * test_fraction)).
// Row order within each part follows the original dataset.
std::pair<Dataset, Dataset> train_test_split(const Dataset& data,
                                             double test_fraction,
                                             std::uint64_t seed);

}  // namespace sparsenet
