#pragma once

#include <stdexcept>
#include <string>

namespace sparsenet {

// Invalid arguments, shape mismatches, contract violations.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Filesystem failures.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input content (CSV cells, config documents).
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The optimizer left the trust region or produced a non-finite objective.
struct divergence_error : std::runtime_error {
  divergence_error(const std::string& what, int epoch_index)
      : std::runtime_error(what), epoch(epoch_index) {}
  int epoch;
};

}  // namespace sparsenet
