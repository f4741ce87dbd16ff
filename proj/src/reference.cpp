#include "sparsenet/reference.hpp"

#include <cmath>

namespace sparsenet::reference {

namespace {

Vector activate(const NetworkArch& arch, Vector z) {
  if (arch.activation == Activation::kTanh)
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = std::tanh(z[i]);
  return z;
}

Vector activation_deriv(const NetworkArch& arch, const Vector& a) {
  if (arch.activation == Activation::kIdentity) return Vector::Ones(a.size());
  return (1.0 - a.array().square()).matrix();  // tanh' from the activation value
}

}  // namespace

Vector forward_sample(const NetworkArch& arch, const NetworkParams& params,
                      const Vector& x) {
  if (x.size() != arch.input_width())
    throw config_error("shape mismatch in input: expected length " +
                       std::to_string(arch.input_width()) + ", got " +
                       std::to_string(x.size()));
  Vector a = activate(arch, params.first_weights * x + params.first_bias);
  for (const auto& h : params.hidden) a = activate(arch, h.weights * a + h.bias);
  return params.output_weights * a + params.output_bias;
}

double risk(const NetworkArch& arch, const NetworkParams& params,
            const Matrix& X, const Vector& Y) {
  double ss = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double r = forward_sample(arch, params, X.row(i).transpose())(0) - Y[i];
    ss += r * r;
  }
  return ss / static_cast<double>(X.rows());
}

NetworkParams risk_gradient(const NetworkArch& arch,
                            const NetworkParams& params, const Matrix& X,
                            const Vector& Y) {
  const int n_stages = arch.n_hidden_stages();
  NetworkParams grad = NetworkParams::zeros(arch);
  const double inv_n = 1.0 / static_cast<double>(X.rows());

  std::vector<Vector> acts(n_stages + 1);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Vector x = X.row(i).transpose();
    acts[0] = activate(arch, params.first_weights * x + params.first_bias);
    for (int s = 0; s < n_stages; ++s)
      acts[s + 1] = activate(arch, params.hidden[s].weights * acts[s] +
                                       params.hidden[s].bias);
    const double pred = (params.output_weights * acts[n_stages] +
                         params.output_bias)(0);
    const double g_out = 2.0 * inv_n * (pred - Y[i]);

    grad.output_weights.row(0) += g_out * acts[n_stages].transpose();
    grad.output_bias[0] += g_out;

    Vector delta = (g_out * params.output_weights.row(0).transpose().array() *
                    activation_deriv(arch, acts[n_stages]).array())
                       .matrix();
    for (int s = n_stages - 1; s >= 0; --s) {
      grad.hidden[s].weights += delta * acts[s].transpose();
      grad.hidden[s].bias += delta;
      delta = (params.hidden[s].weights.transpose() * delta).cwiseProduct(
          activation_deriv(arch, acts[s]));
    }
    grad.first_weights += delta * x.transpose();
    grad.first_bias += delta;
  }
  return grad;
}

}  // namespace sparsenet::reference
