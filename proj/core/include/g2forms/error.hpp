#pragma once

#include <stdexcept>
#include <string>

namespace g2f {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonConvergenceError : Error {
  NonConvergenceError(const std::string& msg, double residual)
      : Error(msg), last_residual(residual) {}
  double last_residual;
};

}  // namespace g2f
