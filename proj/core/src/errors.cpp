#include "externet/errors.hpp"

#include <utility>

namespace externet {

Error::Error(std::string kind, ErrorCategory category,
             const std::string& message, std::vector<std::size_t> indices)
    : std::runtime_error(message),
      kind_(std::move(kind)),
      category_(category),
      indices_(std::move(indices)) {}

NoConvergence::NoConvergence(const std::string& message, std::size_t iterations,
                             double residual, std::vector<double> best)
    : Error("NoConvergence", ErrorCategory::Analysis, message),
      iterations_(iterations),
      residual_(residual),
      best_(std::move(best)) {}

}  // namespace externet
