#include "externet/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "externet/errors.hpp"
#include "externet/spectral.hpp"

namespace externet {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Efficient:
      return "Efficient";
    case Verdict::ImprovableUp:
      return "ImprovableUp";
    case Verdict::ImprovableDown:
      return "ImprovableDown";
    case Verdict::StatusQuoEfficient:
      return "StatusQuoEfficient";
    case Verdict::StatusQuoImprovable:
      return "StatusQuoImprovable";
  }
  return "Unknown";
}

Matrix normalized_jacobian(const JacobianMatrix& J, const Tolerances& tol) {
  Matrix out = J.values;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double own = out(i, i);
    if (std::abs(own) < tol.sing) {
      throw DegenerateDiagonal("|J(" + std::to_string(i + 1) + "," + std::to_string(i + 1) +
                                   ")| is below the singularity guard",
                               {static_cast<std::size_t>(i)});
    }
    out.row(i) /= -own;
  }
  return out;
}

namespace {

void require_interior(const ActionProfile& a) {
  if (!a.interior()) throw DomainError("profile must be interior (all efforts positive)");
}

}  // namespace

ImprovementDirection improvement_direction(const EconomySpec& spec, const ActionProfile& a,
                                           const Tolerances& tol) {
  const JacobianMatrix J = jacobian(spec, a, tol);
  const BenefitsMatrix B = benefits_matrix(J, tol);
  const PerronPair pp = perron_pair(B.values, tol);
  if (std::abs(pp.radius - 1.0) <= tol.pareto) {
    throw AtEfficiency("rho(B(a)) = " + std::to_string(pp.radius) +
                       " is inside the Pareto band; no first-order improvement exists");
  }
  if (pp.radius < 1.0) require_interior(a);

  ImprovementDirection out;
  out.rho = pp.radius;
  out.direction = pp.radius > 1.0 ? pp.right : Vector(-pp.right);
  out.min_gain = (J.values * out.direction).minCoeff();
  return out;
}

ImprovementCheck verify_improvement(const EconomySpec& spec, const ActionProfile& a,
                                    const Vector& d, double delta) {
  if (d.size() != a.values().size()) throw DimensionError("direction length does not match profile");
  const ActionProfile moved(a.values() + delta * d);
  ImprovementCheck out;
  out.utility_changes = eval_utilities(spec, moved) - eval_utilities(spec, a);
  out.passed = (out.utility_changes.array() > 0.0).all();
  return out;
}

ParetoWeights pareto_weights(const EconomySpec& spec, const ActionProfile& a, const Tolerances& tol) {
  require_interior(a);
  const JacobianMatrix J = jacobian(spec, a, tol);
  const BenefitsMatrix B = benefits_matrix(J, tol);
  const PerronPair pp = perron_pair(B.values, tol);
  if (std::abs(pp.radius - 1.0) > tol.pareto) {
    throw NotEfficient("rho(B(a)) = " + std::to_string(pp.radius) + " is outside the Pareto band");
  }
  ParetoWeights out;
  out.theta = pp.left;
  out.foc_residual = (out.theta.transpose() * normalized_jacobian(J, tol)).cwiseAbs().maxCoeff();
  if (out.foc_residual > tol.foc) {
    throw NotEfficient("planner first-order residual " + std::to_string(out.foc_residual) +
                       " exceeds tolerance");
  }
  return out;
}

EfficiencyReport classify_interior(const EconomySpec& spec, const ActionProfile& a,
                                   const Tolerances& tol) {
  require_interior(a);
  const JacobianMatrix J = jacobian(spec, a, tol);
  const BenefitsMatrix B = benefits_matrix(J, tol);
  if (!is_irreducible(B.values)) throw NotIrreducible("B(a) is reducible at the given profile");
  const PerronPair pp = perron_pair(B.values, tol);

  EfficiencyReport report;
  report.profile = a;
  report.rho = pp.radius;
  report.tolerance = tol.pareto;
  if (std::abs(pp.radius - 1.0) <= tol.pareto) {
    report.verdict = Verdict::Efficient;
    report.weights = pp.left;
    const double foc = (pp.left.transpose() * normalized_jacobian(J, tol)).cwiseAbs().maxCoeff();
    if (foc > tol.foc) {
      report.notes.push_back("planner first-order residual " + std::to_string(foc) +
                             " exceeds the FOC tolerance");
    }
  } else if (pp.radius > 1.0) {
    report.verdict = Verdict::ImprovableUp;
    report.direction = pp.right;
  } else {
    report.verdict = Verdict::ImprovableDown;
    report.direction = Vector(-pp.right);
  }
  return report;
}

EfficiencyReport classify_status_quo(const EconomySpec& spec, const Tolerances& tol) {
  const auto n = static_cast<Eigen::Index>(spec.agents());
  EfficiencyReport report;
  report.profile = ActionProfile(Vector::Zero(n));
  report.tolerance = tol.pareto;

  if (spec.has_log_terms()) {
    report.rho = std::numeric_limits<double>::quiet_NaN();
    report.verdict = Verdict::StatusQuoImprovable;
    report.notes.push_back(
        "UndefinedAtZero: log terms make marginal benefits diverge at 0; improvable by convention");
    return report;
  }

  const BenefitsMatrix B = benefits_at_status_quo(spec, tol);
  report.rho = spectral_radius(B.values, tol);
  if (report.rho <= 1.0 + tol.pareto) {
    report.verdict = Verdict::StatusQuoEfficient;
    if (report.rho > 1.0 - tol.pareto) {
      report.notes.push_back("rho(B(0)) is within the tolerance band of 1; efficiency is knife-edge");
    }
    return report;
  }

  report.verdict = Verdict::StatusQuoImprovable;
  if (is_irreducible(B.values)) {
    report.direction = perron_pair(B.values, tol).right;
    return report;
  }
  // Reducible: push along the Perron vector of the component with the
  // largest radius; agents outside it keep their effort at 0.
  double best = -1.0;
  std::vector<std::size_t> best_component;
  for (const auto& component : strongly_connected_components(B.values)) {
    if (component.size() < 2) continue;
    Matrix sub(static_cast<Eigen::Index>(component.size()), static_cast<Eigen::Index>(component.size()));
    for (std::size_t r = 0; r < component.size(); ++r) {
      for (std::size_t c = 0; c < component.size(); ++c) {
        sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            B.values(static_cast<Eigen::Index>(component[r]), static_cast<Eigen::Index>(component[c]));
      }
    }
    const double rho = spectral_radius(sub, tol);
    if (rho > best) {
      best = rho;
      best_component = component;
      const Vector v = perron_pair(sub, tol).right;
      Vector d = Vector::Zero(n);
      for (std::size_t r = 0; r < component.size(); ++r) {
        d(static_cast<Eigen::Index>(component[r])) = v(static_cast<Eigen::Index>(r));
      }
      report.direction = d;
    }
  }
  report.notes.push_back("B(0) is reducible; direction is supported on the dominant component only");
  return report;
}

CoreCheckReport core_check_bruteforce(const EconomySpec& spec, const ActionProfile& a,
                                      const CoreCheckOptions& opts) {
  const std::size_t n = spec.agents();
  if (n > opts.max_agents) {
    throw TooManyAgents("core check enumerates 2^n coalitions; n = " + std::to_string(n) +
                        " exceeds the limit of " + std::to_string(opts.max_agents));
  }
  require_interior(a);
  if (opts.grid < 2) throw DomainError("grid needs at least two points per axis");
  if (!(opts.radius > 0.0)) throw DomainError("search radius must be positive");

  const Vector base = eval_utilities(spec, a);
  const bool floor_zeros = spec.has_log_terms();
  const double step = opts.radius / static_cast<double>(opts.grid - 1);

  CoreCheckReport report;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) members.push_back(i);
    }
    ++report.coalitions_checked;

    std::vector<std::size_t> idx(members.size(), 0);
    double best_min_gain = 0.0;
    std::optional<BlockingCoalition> found;
    while (true) {
      Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < members.size(); ++k) {
        x(static_cast<Eigen::Index>(members[k])) = step * static_cast<double>(idx[k]);
      }
      if (floor_zeros) x = x.cwiseMax(opts.floor);
      const Vector u = eval_utilities(spec, ActionProfile(x));
      ++report.points_evaluated;

      double min_gain = std::numeric_limits<double>::infinity();
      for (std::size_t i : members) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double slack = 1e-12 * std::max(1.0, std::abs(base(ii)));
        min_gain = std::min(min_gain, u(ii) - base(ii) - slack);
      }
      if (min_gain > best_min_gain) {
        best_min_gain = min_gain;
        BlockingCoalition b;
        b.members = members;
        b.deviation = x;
        b.gains.resize(static_cast<Eigen::Index>(members.size()));
        for (std::size_t k = 0; k < members.size(); ++k) {
          const auto ii = static_cast<Eigen::Index>(members[k]);
          b.gains(static_cast<Eigen::Index>(k)) = u(ii) - base(ii);
        }
        found = std::move(b);
      }

      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == opts.grid) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    if (found) report.blocking.push_back(std::move(*found));
  }
  report.note = report.blocking.empty()
                    ? "no blocking coalition found at this grid resolution (not a proof of core membership)"
                    : std::to_string(report.blocking.size()) + " blocking coalition(s) found";
  return report;
}

}  // namespace externet
