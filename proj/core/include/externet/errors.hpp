#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace externet {

/// Whether a failure came from malformed input or from the analysis itself.
/// The CLI maps these to exit codes 1 and 2.
enum class ErrorCategory { Input, Analysis };

/// Base class for every error raised by the library. `kind()` is the stable
/// error name (e.g. "NotIrreducible") and `indices()` lists the offending
/// 0-based agent indices, when there are any.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, ErrorCategory category, const std::string& message,
        std::vector<std::size_t> indices = {});

  const std::string& kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::string kind_;
  ErrorCategory category_;
  std::vector<std::size_t> indices_;
};

#define EXTERNET_DEFINE_ERROR(Name, Category)                                  \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& message,                                 \
                  std::vector<std::size_t> indices = {})                      \
        : Error(#Name, ErrorCategory::Category, message, std::move(indices)) {} \
  };

// Input errors.
EXTERNET_DEFINE_ERROR(InvalidSpec, Input)
EXTERNET_DEFINE_ERROR(DimensionError, Input)
EXTERNET_DEFINE_ERROR(IndexOutOfRange, Input)
EXTERNET_DEFINE_ERROR(BadPartition, Input)
EXTERNET_DEFINE_ERROR(ParseError, Input)
EXTERNET_DEFINE_ERROR(IoError, Input)
EXTERNET_DEFINE_ERROR(UsageError, Input)

// Analysis errors.
EXTERNET_DEFINE_ERROR(DomainError, Analysis)
EXTERNET_DEFINE_ERROR(AssumptionViolation, Analysis)
EXTERNET_DEFINE_ERROR(DegenerateDiagonal, Analysis)
EXTERNET_DEFINE_ERROR(NotIrreducible, Analysis)
EXTERNET_DEFINE_ERROR(NotEfficient, Analysis)
EXTERNET_DEFINE_ERROR(AtEfficiency, Analysis)
EXTERNET_DEFINE_ERROR(UndefinedAtZero, Analysis)
EXTERNET_DEFINE_ERROR(TooManyAgents, Analysis)
EXTERNET_DEFINE_ERROR(SpectralBound, Analysis)
EXTERNET_DEFINE_ERROR(NonPositive, Analysis)
EXTERNET_DEFINE_ERROR(LeftDomain, Analysis)
EXTERNET_DEFINE_ERROR(NoSolution, Analysis)

#undef EXTERNET_DEFINE_ERROR

/// Iterative method ran out of iterations. Carries the best iterate found and
/// its residual so callers can inspect how close it got.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& message, std::size_t iterations,
                double residual, std::vector<double> best = {});

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }
  const std::vector<double>& best() const noexcept { return best_; }

 private:
  std::size_t iterations_;
  double residual_;
  std::vector<double> best_;
};

}  // namespace externet
