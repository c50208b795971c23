#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "externet/matrix.hpp"
#include "externet/tolerances.hpp"

namespace externet {

/// Nonnegative effort levels, one per agent.
class ActionProfile {
 public:
  ActionProfile() = default;
  /// Throws DomainError if any entry is negative or not finite.
  explicit ActionProfile(Vector a);
  ActionProfile(std::initializer_list<double> a);

  static ActionProfile ones(std::size_t n) { return ActionProfile(Vector::Ones(static_cast<Eigen::Index>(n))); }

  const Vector& values() const noexcept { return a_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(a_.size()); }
  double operator[](std::size_t i) const { return a_(static_cast<Eigen::Index>(i)); }
  bool interior() const noexcept { return a_.size() > 0 && (a_.array() > 0.0).all(); }

 private:
  Vector a_;
};

/// Black-box utilities u : R_+^n -> R^n. Implementations must be
/// deterministic and safe to call concurrently.
class UtilityOracle {
 public:
  virtual ~UtilityOracle() = default;

  virtual std::size_t agents() const = 0;
  virtual Vector evaluate(const Vector& a) const = 0;

  /// Row i of the Jacobian (partials of u_i). Returning nullopt selects
  /// central finite differences.
  virtual std::optional<Vector> gradient_row(std::size_t /*i*/, const Vector& /*a*/) const {
    return std::nullopt;
  }
};

/// u_i(a) = -a_i + sum_j [alpha G_ij a_j + H_ij log a_j].
struct LinearLogPayload {
  double alpha = 0.0;
  Matrix G;
  Matrix H;
};

/// Linear utilities u_i(a) = -a_i + sum_j B0_ij a_j, so B(a) = B0 everywhere.
struct RawBenefitsPayload {
  Matrix B0;
};

struct OraclePayload {
  std::shared_ptr<const UtilityOracle> oracle;
};

enum class EconomyKind { ParametricLinearLog, RawBenefits, OracleBacked };

/// Utility-side description of an economy. Construction validates the
/// maintained invariants and throws InvalidSpec on failure.
class EconomySpec {
 public:
  static EconomySpec linear_log(double alpha, Matrix G, Matrix H);
  static EconomySpec raw_benefits(Matrix B0);
  static EconomySpec oracle_backed(std::shared_ptr<const UtilityOracle> oracle);

  std::size_t agents() const noexcept { return n_; }
  EconomyKind kind() const noexcept;

  const LinearLogPayload* linear_log_payload() const { return std::get_if<LinearLogPayload>(&payload_); }
  const RawBenefitsPayload* raw_payload() const { return std::get_if<RawBenefitsPayload>(&payload_); }
  const OraclePayload* oracle_payload() const { return std::get_if<OraclePayload>(&payload_); }

  /// True when some utility has a log term, so profiles must be interior.
  bool has_log_terms() const;

  /// h_i = sum_j H_ij (zero vector for non-family specs).
  Vector h() const;

 private:
  EconomySpec(std::size_t n, std::variant<LinearLogPayload, RawBenefitsPayload, OraclePayload> payload)
      : n_(n), payload_(std::move(payload)) {}

  std::size_t n_ = 0;
  std::variant<LinearLogPayload, RawBenefitsPayload, OraclePayload> payload_;
};

bool operator==(const EconomySpec& lhs, const EconomySpec& rhs);

/// J_ij = du_i/da_j evaluated at `at`.
struct JacobianMatrix {
  Matrix values;
  Vector at;
};

/// B_ij = J_ij / (-J_ii) off the diagonal, zero on it.
struct BenefitsMatrix {
  Matrix values;
  Vector at;
};

Vector eval_utilities(const EconomySpec& spec, const ActionProfile& a);

/// Analytic for the built-in families, finite differences for oracles that
/// lack gradient rows. Throws AssumptionViolation when J_ii >= 0 or an
/// off-diagonal partial is negative.
JacobianMatrix jacobian(const EconomySpec& spec, const ActionProfile& a,
                        const Tolerances& tol = {});

/// Central-difference Jacobian of `eval_utilities`, whatever the spec kind.
/// Falls back to a forward difference for coordinates too close to 0.
Matrix finite_difference_jacobian(const EconomySpec& spec, const Vector& a,
                                  const Tolerances& tol = {});

BenefitsMatrix benefits_matrix(const JacobianMatrix& J, const Tolerances& tol = {});

/// benefits_matrix(jacobian(spec, a)).
BenefitsMatrix benefits_at(const EconomySpec& spec, const ActionProfile& a,
                           const Tolerances& tol = {});

/// B(0). Throws UndefinedAtZero for specs with log terms.
BenefitsMatrix benefits_at_status_quo(const EconomySpec& spec, const Tolerances& tol = {});

struct SampleCheck {
  Vector profile;
  bool costly_actions = true;
  bool positive_externalities = true;
  bool irreducible = false;
  std::vector<std::string> failures;

  bool passed() const { return costly_actions && positive_externalities && irreducible; }
};

struct ValidationReport {
  std::vector<SampleCheck> samples;
  bool passed = false;
};

/// Samples the maintained assumptions at each caller profile plus the
/// all-ones profile. Failures are recorded, never thrown.
ValidationReport validate(const EconomySpec& spec, const std::vector<ActionProfile>& samples,
                          const Tolerances& tol = {});

}  // namespace externet
