#include "sparsenet/arch.hpp"

#include <cmath>

namespace sparsenet {

std::string to_string(Activation a) {
  return a == Activation::kTanh ? "tanh" : "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw config_error("unknown activation '" + name + "' (expected tanh or identity)");
}

void NetworkArch::validate() const {
  if (layer_widths.size() < 3)
    throw config_error("layer_widths needs at least 3 entries (input, hidden, output)");
  for (std::size_t i = 0; i < layer_widths.size(); ++i)
    if (layer_widths[i] < 1)
      throw config_error("layer_widths[" + std::to_string(i) + "] must be >= 1");
}

NetworkParams NetworkParams::zeros(const NetworkArch& arch) {
  arch.validate();
  const auto& w = arch.layer_widths;
  NetworkParams p;
  p.first_weights = Matrix::Zero(w[1], w[0]);
  p.first_bias = Vector::Zero(w[1]);
  p.hidden.resize(arch.n_hidden_stages());
  for (int i = 0; i < arch.n_hidden_stages(); ++i) {
    p.hidden[i].weights = Matrix::Zero(w[i + 2], w[i + 1]);
    p.hidden[i].bias = Vector::Zero(w[i + 2]);
  }
  p.output_weights = Matrix::Zero(w.back(), w[w.size() - 2]);
  p.output_bias = Vector::Zero(w.back());
  return p;
}

Vector NetworkParams::group_norms() const {
  return first_weights.colwise().norm().transpose();
}

bool NetworkParams::all_finite() const {
  if (!first_weights.allFinite() || !first_bias.allFinite()) return false;
  for (const auto& h : hidden)
    if (!h.weights.allFinite() || !h.bias.allFinite()) return false;
  return output_weights.allFinite() && output_bias.allFinite();
}

double NetworkParams::max_abs() const {
  double m = first_weights.cwiseAbs().maxCoeff();
  m = std::max(m, first_bias.cwiseAbs().maxCoeff());
  for (const auto& h : hidden) {
    m = std::max(m, h.weights.cwiseAbs().maxCoeff());
    m = std::max(m, h.bias.cwiseAbs().maxCoeff());
  }
  m = std::max(m, output_weights.cwiseAbs().maxCoeff());
  m = std::max(m, output_bias.cwiseAbs().maxCoeff());
  return m;
}

namespace {
void require(bool ok, const std::string& layer, long r0, long c0, long r1, long c1) {
  if (!ok)
    throw config_error("shape mismatch in " + layer + ": expected " +
                       std::to_string(r0) + "x" + std::to_string(c0) + ", got " +
                       std::to_string(r1) + "x" + std::to_string(c1));
}
}  // namespace

void NetworkParams::validate_shapes(const NetworkArch& arch) const {
  const auto& w = arch.layer_widths;
  require(first_weights.rows() == w[1] && first_weights.cols() == w[0],
          "first layer weights", w[1], w[0], first_weights.rows(), first_weights.cols());
  require(first_bias.size() == w[1], "first layer bias", w[1], 1,
          first_bias.size(), 1);
  if (static_cast<int>(hidden.size()) != arch.n_hidden_stages())
    throw config_error("shape mismatch: expected " +
                       std::to_string(arch.n_hidden_stages()) + " hidden stages, got " +
                       std::to_string(hidden.size()));
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    const std::string name = "hidden stage " + std::to_string(i + 1);
    require(hidden[i].weights.rows() == w[i + 2] && hidden[i].weights.cols() == w[i + 1],
            name + " weights", w[i + 2], w[i + 1], hidden[i].weights.rows(),
            hidden[i].weights.cols());
    require(hidden[i].bias.size() == w[i + 2], name + " bias", w[i + 2], 1,
            hidden[i].bias.size(), 1);
  }
  require(output_weights.rows() == w.back() && output_weights.cols() == w[w.size() - 2],
          "output weights", w.back(), w[w.size() - 2], output_weights.rows(),
          output_weights.cols());
  require(output_bias.size() == w.back(), "output bias", w.back(), 1,
          output_bias.size(), 1);
}

}  // namespace sparsenet
