#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sparsenet/errors.hpp"

namespace sparsenet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Only everywhere-analytic activations are offered.
enum class Activation { kTanh, kIdentity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

// Layer widths [d0, d1, ..., dL]: an affine map d0 -> d1 followed by the
// activation, then layer_widths.size() - 3 further activated stages, then an
// affine output map d_{L-1} -> dL with no activation.
struct NetworkArch {
  std::vector<int> layer_widths;
  Activation activation = Activation::kTanh;

  int input_width() const { return layer_widths.front(); }
  int output_width() const { return layer_widths.back(); }
  int first_width() const { return layer_widths[1]; }
  int n_hidden_stages() const {
    return static_cast<int>(layer_widths.size()) - 3;
  }

  void validate() const;
};

struct LayerParams {
  Matrix weights;
  Vector bias;
};

// All weights and biases of a network. Column k of first_weights is the
// parameter group of input feature k; group norms are Euclidean column norms.
struct NetworkParams {
  Matrix first_weights;             // d1 x d0
  Vector first_bias;                // d1
  std::vector<LayerParams> hidden;  // activated stages after the first
  Matrix output_weights;            // dL x d_{L-1}
  Vector output_bias;               // dL

  static NetworkParams zeros(const NetworkArch& arch);

  int n_groups() const { return static_cast<int>(first_weights.cols()); }
  double group_norm(int k) const { return first_weights.col(k).norm(); }
  Vector group_norms() const;

  bool all_finite() const;
  double max_abs() const;

  // Throws config_error naming the offending layer.
  void validate_shapes(const NetworkArch& arch) const;
};

}  // namespace sparsenet
