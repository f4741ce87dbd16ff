#pragma once

#include "sparsenet/arch.hpp"
#include "sparsenet/data.hpp"

namespace sparsenet {

// Single-sample forward map f_alpha(x). Pure; deterministic.
Vector forward(const NetworkArch& arch, const NetworkParams& params,
               const Vector& x);

// (1/n) sum_i (f_alpha(X_i) - Y_i)^2. Requires a nonempty dataset and a
// single-output network.
double empirical_risk(const NetworkArch& arch, const NetworkParams& params,
                      const Dataset& data);

// Exact reverse-mode gradient of empirical_risk with respect to every
// parameter, in NetworkParams layout.
NetworkParams gradient(const NetworkArch& arch, const NetworkParams& params,
                       const Dataset& data);

}  // namespace sparsenet
