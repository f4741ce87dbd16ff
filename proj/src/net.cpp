#include "sparsenet/net.hpp"

#include "sparsenet/kernels.hpp"
#include "sparsenet/reference.hpp"

namespace sparsenet {

Vector forward(const NetworkArch& arch, const NetworkParams& params,
               const Vector& x) {
  arch.validate();
  params.validate_shapes(arch);
  if (!params.all_finite()) throw config_error("parameters contain non-finite entries");
  return reference::forward_sample(arch, params, x);
}

double empirical_risk(const NetworkArch& arch, const NetworkParams& params,
                      const Dataset& data) {
  arch.validate();
  params.validate_shapes(arch);
  data.validate();
  if (data.n_features() != arch.input_width())
    throw config_error("shape mismatch in input: dataset has " +
                       std::to_string(data.n_features()) + " features, network expects " +
                       std::to_string(arch.input_width()));
  return kernels::risk(arch, params, data.X, data.Y);
}

NetworkParams gradient(const NetworkArch& arch, const NetworkParams& params,
                       const Dataset& data) {
  arch.validate();
  params.validate_shapes(arch);
  data.validate();
  if (data.n_features() != arch.input_width())
    throw config_error("shape mismatch in input: dataset has " +
                       std::to_string(data.n_features()) + " features, network expects " +
                       std::to_string(arch.input_width()));
  NetworkParams grad;
  kernels::risk_and_gradient(arch, params, data.X, data.Y, grad);
  return grad;
}

}  // namespace sparsenet
