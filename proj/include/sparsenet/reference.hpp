#pragma once

#include "sparsenet/arch.hpp"

// Plain per-sample implementations: std::tanh, no blocking, no OpenMP.
// Kept as the obviously-correct baseline for the tests and the benchmark.
namespace sparsenet::reference {

Vector forward_sample(const NetworkArch& arch, const NetworkParams& params,
                      const Vector& x);

double risk(const NetworkArch& arch, const NetworkParams& params,
            const Matrix& X, const Vector& Y);

NetworkParams risk_gradient(const NetworkArch& arch,
                            const NetworkParams& params, const Matrix& X,
                            const Vector& Y);

}  // namespace sparsenet::reference
