#pragma once

#include <vector>

#include "sparsenet/arch.hpp"

namespace sparsenet::kernels {

// Samples are processed in fixed blocks of kBlockRows and block partials are
// reduced in block order, so every result is bitwise independent of the
// number of OpenMP threads.
inline constexpr Eigen::Index kBlockRows = 256;

inline Eigen::Index n_blocks(Eigen::Index n) {
  return (n + kBlockRows - 1) / kBlockRows;
}

// Post-activation values per stage for one block, plus predictions and the
// block residual. Buffers are reused across calls of matching shape.
struct BlockCache {
  std::vector<Matrix> activations;
  Matrix pred;
  Vector residual;
};

struct BatchCache {
  std::vector<BlockCache> blocks;
};

// Per-block backward-pass scratch: the block's gradient partial and the
// delta buffers, reused across epochs.
struct BlockScratch {
  NetworkParams partial;
  Matrix delta;
  Matrix delta_next;
};

// Batched forward map, general output width.
Matrix forward_batch(const NetworkArch& arch, const NetworkParams& params,
                     const Matrix& X);

// Mean squared residual (1/n) sum (f(X_i) - Y_i)^2; output width must be 1.
// Fills activations and residuals into `cache` when given, for reuse by
// gradient_from_cache at the same (params, X, Y).
double risk(const NetworkArch& arch, const NetworkParams& params,
            const Matrix& X, const Vector& Y, BatchCache* cache = nullptr);

// Reverse pass over a cache produced by risk(); writes the exact gradient of
// the mean squared residual into `grad` (NetworkParams layout).
void gradient_from_cache(const NetworkArch& arch, const NetworkParams& params,
                         const Matrix& X, const Vector& Y,
                         const BatchCache& cache,
                         std::vector<BlockScratch>& scratch,
                         NetworkParams& grad);

double risk_and_gradient(const NetworkArch& arch, const NetworkParams& params,
                         const Matrix& X, const Vector& Y,
                         NetworkParams& grad);

}  // namespace sparsenet::kernels
