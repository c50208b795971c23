#include "externet/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "externet/errors.hpp"
#include "externet/spectral.hpp"

namespace externet {
namespace {

std::string entry_name(const char* what, Eigen::Index i, Eigen::Index j) {
  return std::string(what) + "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

void check_network(const Matrix& M, std::size_t n, const char* name) {
  if (M.rows() != static_cast<Eigen::Index>(n) || M.cols() != static_cast<Eigen::Index>(n)) {
    throw InvalidSpec(std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double v = M(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidSpec(entry_name(name, i, j) + " must be finite and nonnegative",
                          {static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
      }
      if (i == j && v != 0.0) {
        throw InvalidSpec(entry_name(name, i, j) + " must be zero (no self-links)",
                          {static_cast<std::size_t>(i)});
      }
    }
  }
}

void check_profile(const EconomySpec& spec, const Vector& a) {
  if (static_cast<std::size_t>(a.size()) != spec.agents()) {
    throw DimensionError("profile has " + std::to_string(a.size()) + " entries, economy has " +
                         std::to_string(spec.agents()) + " agents");
  }
}

void require_log_domain(const EconomySpec& spec, const Vector& a) {
  const auto* p = spec.linear_log_payload();
  if (p == nullptr) return;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) > 0.0) continue;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (p->H(i, j) > 0.0) {
        throw DomainError("log term H(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                              ") needs a positive effort for agent " + std::to_string(j + 1),
                          {static_cast<std::size_t>(j)});
      }
    }
  }
}

void check_assumptions(const Matrix& J, double noise) {
  for (Eigen::Index i = 0; i < J.rows(); ++i) {
    if (!(J(i, i) < 0.0)) {
      throw AssumptionViolation("costly actions fails: J" + entry_name("", i, i) + " = " +
                                    std::to_string(J(i, i)) + " is not negative",
                                {static_cast<std::size_t>(i), static_cast<std::size_t>(i)});
    }
    for (Eigen::Index j = 0; j < J.cols(); ++j) {
      if (i != j && J(i, j) < -noise) {
        throw AssumptionViolation("positive externalities fails: J" + entry_name("", i, j) +
                                      " = " + std::to_string(J(i, j)) + " is negative",
                                  {static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
      }
    }
  }
}

}  // namespace

ActionProfile::ActionProfile(Vector a) : a_(std::move(a)) {
  for (Eigen::Index i = 0; i < a_.size(); ++i) {
    if (!std::isfinite(a_(i)) || a_(i) < 0.0) {
      throw DomainError("effort of agent " + std::to_string(i + 1) + " must be finite and nonnegative",
                        {static_cast<std::size_t>(i)});
    }
  }
}

ActionProfile::ActionProfile(std::initializer_list<double> a)
    : ActionProfile(from_std(std::vector<double>(a))) {}

EconomySpec EconomySpec::linear_log(double alpha, Matrix G, Matrix H) {
  const auto n = static_cast<std::size_t>(G.rows());
  if (n < 2) throw InvalidSpec("an economy needs at least two agents");
  check_network(G, n, "G");
  check_network(H, n, "H");
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw InvalidSpec("alpha must be finite and nonnegative");
  }
  const double rho = spectral_radius(G);
  if (alpha * rho >= 1.0) {
    throw InvalidSpec("alpha = " + std::to_string(alpha) + " violates alpha < 1/rho(G) with rho(G) = " +
                      std::to_string(rho));
  }
  return EconomySpec(n, LinearLogPayload{alpha, std::move(G), std::move(H)});
}

EconomySpec EconomySpec::raw_benefits(Matrix B0) {
  const auto n = static_cast<std::size_t>(B0.rows());
  if (n < 2) throw InvalidSpec("an economy needs at least two agents");
  check_network(B0, n, "B0");
  return EconomySpec(n, RawBenefitsPayload{std::move(B0)});
}

EconomySpec EconomySpec::oracle_backed(std::shared_ptr<const UtilityOracle> oracle) {
  if (!oracle) throw InvalidSpec("oracle must not be null");
  const std::size_t n = oracle->agents();
  if (n < 2) throw InvalidSpec("an economy needs at least two agents");
  return EconomySpec(n, OraclePayload{std::move(oracle)});
}

EconomyKind EconomySpec::kind() const noexcept {
  switch (payload_.index()) {
    case 0:
      return EconomyKind::ParametricLinearLog;
    case 1:
      return EconomyKind::RawBenefits;
    default:
      return EconomyKind::OracleBacked;
  }
}

bool EconomySpec::has_log_terms() const {
  const auto* p = linear_log_payload();
  return p != nullptr && (p->H.array() > 0.0).any();
}

Vector EconomySpec::h() const {
  if (const auto* p = linear_log_payload()) return p->H.rowwise().sum();
  return Vector::Zero(static_cast<Eigen::Index>(n_));
}

bool operator==(const EconomySpec& lhs, const EconomySpec& rhs) {
  if (lhs.agents() != rhs.agents() || lhs.kind() != rhs.kind()) return false;
  if (const auto* a = lhs.linear_log_payload()) {
    const auto* b = rhs.linear_log_payload();
    return a->alpha == b->alpha && a->G == b->G && a->H == b->H;
  }
  if (const auto* a = lhs.raw_payload()) return a->B0 == rhs.raw_payload()->B0;
  return lhs.oracle_payload()->oracle == rhs.oracle_payload()->oracle;
}

Vector eval_utilities(const EconomySpec& spec, const ActionProfile& profile) {
  const Vector& a = profile.values();
  check_profile(spec, a);
  if (const auto* p = spec.linear_log_payload()) {
    require_log_domain(spec, a);
    Vector u = -a + p->alpha * (p->G * a);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (p->H(i, j) != 0.0) u(i) += p->H(i, j) * std::log(a(j));
      }
    }
    return u;
  }
  if (const auto* p = spec.raw_payload()) return -a + p->B0 * a;
  const auto& oracle = *spec.oracle_payload()->oracle;
  Vector u = oracle.evaluate(a);
  if (static_cast<std::size_t>(u.size()) != spec.agents()) {
    throw DimensionError("oracle returned " + std::to_string(u.size()) + " utilities");
  }
  return u;
}

Matrix finite_difference_jacobian(const EconomySpec& spec, const Vector& a, const Tolerances& tol) {
  check_profile(spec, a);
  const auto n = a.size();
  Matrix J(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = tol.fd_step * std::max(1.0, a(j));
    Vector up = a;
    up(j) += h;
    const Vector u_up = eval_utilities(spec, ActionProfile(up));
    if (a(j) - h > 0.0 || (a(j) - h >= 0.0 && !spec.has_log_terms())) {
      Vector down = a;
      down(j) -= h;
      J.col(j) = (u_up - eval_utilities(spec, ActionProfile(down))) / (2.0 * h);
    } else {
      J.col(j) = (u_up - eval_utilities(spec, ActionProfile(a))) / h;
    }
  }
  return J;
}

namespace {

// Jacobian without the post-hoc assumption checks.
Matrix raw_jacobian(const EconomySpec& spec, const Vector& a, const Tolerances& tol) {
  check_profile(spec, a);
  const auto n = a.size();
  if (const auto* p = spec.linear_log_payload()) {
    require_log_domain(spec, a);
    Matrix J = p->alpha * p->G;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (p->H(i, j) != 0.0) J(i, j) += p->H(i, j) / a(j);
      }
    }
    J.diagonal().setConstant(-1.0);
    return J;
  }
  if (const auto* p = spec.raw_payload()) {
    Matrix J = p->B0;
    J.diagonal().setConstant(-1.0);
    return J;
  }

  const auto& oracle = *spec.oracle_payload()->oracle;
  Matrix J(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = oracle.gradient_row(static_cast<std::size_t>(i), a);
    if (!row) {
      J = finite_difference_jacobian(spec, a, tol);
      // finite-difference noise around genuinely zero partials
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
          if (r != c && J(r, c) < 0.0 && J(r, c) >= -tol.fd_noise) J(r, c) = 0.0;
        }
      }
      return J;
    }
    if (row->size() != n) throw DimensionError("oracle gradient row has the wrong length");
    J.row(i) = row->transpose();
  }
  return J;
}

}  // namespace

JacobianMatrix jacobian(const EconomySpec& spec, const ActionProfile& profile, const Tolerances& tol) {
  JacobianMatrix out{raw_jacobian(spec, profile.values(), tol), profile.values()};
  check_assumptions(out.values, 0.0);
  return out;
}

BenefitsMatrix benefits_matrix(const JacobianMatrix& J, const Tolerances& tol) {
  const auto n = J.values.rows();
  BenefitsMatrix out{Matrix::Zero(n, n), J.at};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double own = J.values(i, i);
    if (std::abs(own) < tol.sing) {
      throw DegenerateDiagonal("|J(" + std::to_string(i + 1) + "," + std::to_string(i + 1) +
                                   ")| is below the singularity guard",
                               {static_cast<std::size_t>(i)});
    }
    if (own > 0.0) {
      throw AssumptionViolation("costly actions fails for agent " + std::to_string(i + 1),
                                {static_cast<std::size_t>(i)});
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) out.values(i, j) = J.values(i, j) / (-own);
    }
  }
  return out;
}

BenefitsMatrix benefits_at(const EconomySpec& spec, const ActionProfile& a, const Tolerances& tol) {
  return benefits_matrix(jacobian(spec, a, tol), tol);
}

BenefitsMatrix benefits_at_status_quo(const EconomySpec& spec, const Tolerances& tol) {
  if (spec.has_log_terms()) {
    throw UndefinedAtZero("marginal log benefits diverge at the status quo, so B(0) is undefined");
  }
  return benefits_at(spec, ActionProfile(Vector::Zero(static_cast<Eigen::Index>(spec.agents()))), tol);
}

ValidationReport validate(const EconomySpec& spec, const std::vector<ActionProfile>& samples,
                          const Tolerances& tol) {
  std::vector<ActionProfile> all = samples;
  all.push_back(ActionProfile::ones(spec.agents()));

  ValidationReport report;
  report.passed = true;
  for (const auto& sample : all) {
    SampleCheck check;
    check.profile = sample.values();
    try {
      const Matrix J = raw_jacobian(spec, sample.values(), tol);
      for (Eigen::Index i = 0; i < J.rows(); ++i) {
        if (!(J(i, i) < 0.0)) {
          check.costly_actions = false;
          check.failures.push_back("costly actions fails for agent " + std::to_string(i + 1));
        }
        for (Eigen::Index j = 0; j < J.cols(); ++j) {
          if (i != j && J(i, j) < -tol.fd_noise) {
            check.positive_externalities = false;
            check.failures.push_back("positive externalities fails at " + entry_name("J", i, j));
          }
        }
      }
      if (check.costly_actions && check.positive_externalities) {
        JacobianMatrix jm{J, sample.values()};
        for (Eigen::Index i = 0; i < J.rows(); ++i) {
          for (Eigen::Index j = 0; j < J.cols(); ++j) {
            if (i != j && jm.values(i, j) < 0.0) jm.values(i, j) = 0.0;
          }
        }
        check.irreducible = is_irreducible(benefits_matrix(jm, tol).values);
        if (!check.irreducible) check.failures.push_back("benefits matrix is reducible");
      }
    } catch (const Error& e) {
      check.costly_actions = check.costly_actions && e.kind() != "AssumptionViolation";
      check.failures.push_back(e.kind() + ": " + e.what());
    }
    report.passed = report.passed && check.passed();
    report.samples.push_back(std::move(check));
  }
  return report;
}

}  // namespace externet
