#pragma once

#include <stdexcept>

namespace riskprune {

// malformed, truncated or otherwise unreadable input data
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace riskprune
