#pragma once

#include <stdexcept>

namespace ier {

/// Invalid user-supplied configuration: scenario files, CLI flags, checkpoints.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ier
