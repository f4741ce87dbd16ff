#pragma once

#include <iosfwd>

#include "sparsenet/net.hpp"
#include "sparsenet/rng.hpp"

// Random-instance generators and the finite-difference oracle shared by the
// unit tests, the acceptance suite and the `check` subcommand. The oracle
// probes empirical_risk by forward evaluation only and is independent of the
// reverse-mode path it checks.
namespace sparsenet::testing {

NetworkArch random_arch(SplitMix64& rng, int max_hidden_stages = 2,
                        int max_width = 5,
                        Activation activation = Activation::kTanh);

NetworkParams random_params(const NetworkArch& arch, SplitMix64& rng,
                            double scale = 1.0);

Dataset random_dataset(int n, int d0, SplitMix64& rng);

// Central finite differences of empirical_risk, coordinate by coordinate.
NetworkParams fd_gradient(const NetworkArch& arch, const NetworkParams& params,
                          const Dataset& data, double step = 1e-5);

// max_k |g_k - g_fd_k| / (1 + |g_fd_k|) between the analytic gradient and
// the finite-difference oracle on one random instance.
double fd_relative_error(const NetworkArch& arch, const NetworkParams& params,
                         const Dataset& data, double fd_step = 1e-5);

// Quick invariant/oracle suite behind `sparsenet check`; prints one line per
// check and returns true when everything passed.
bool selfcheck(std::ostream& out);

}  // namespace sparsenet::testing
