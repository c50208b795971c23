#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "externet/model.hpp"

namespace externet {

enum class Verdict {
  Efficient,            // interior, rho = 1
  ImprovableUp,         // interior, rho > 1: everyone works a little more
  ImprovableDown,       // interior, rho < 1: everyone works a little less
  StatusQuoEfficient,   // a = 0, rho(B(0)) <= 1
  StatusQuoImprovable,  // a = 0, rho(B(0)) > 1
};

const char* to_string(Verdict v);

struct EfficiencyReport {
  ActionProfile profile;
  double rho = 0.0;  // NaN when B at the profile is undefined
  Verdict verdict = Verdict::Efficient;
  std::optional<Vector> direction;  // unit 1-norm, all entries of one sign
  std::optional<Vector> weights;    // unit 1-norm, positive
  double tolerance = 0.0;
  std::vector<std::string> notes;
};

/// Efficiency diagnosis at an interior profile from rho(B(a)). Throws NotIrreducible when
/// B(a) is reducible.
EfficiencyReport classify_interior(const EconomySpec& spec, const ActionProfile& a,
                                   const Tolerances& tol = {});

/// Diagnosis at a = 0. Specs with log terms have no B(0); they are reported
/// as StatusQuoImprovable with a note because marginal benefits diverge.
EfficiencyReport classify_status_quo(const EconomySpec& spec, const Tolerances& tol = {});

struct ImprovementDirection {
  Vector direction;     // +/- right Perron vector of B(a), unit 1-norm
  double rho = 0.0;
  double min_gain = 0.0;  // min_i (J(a) d)_i, positive for a valid direction
};

/// Throws AtEfficiency when |rho - 1| is inside the Pareto band.
ImprovementDirection improvement_direction(const EconomySpec& spec, const ActionProfile& a,
                                           const Tolerances& tol = {});

struct ImprovementCheck {
  Vector utility_changes;  // u(a + delta d) - u(a)
  bool passed = false;
};

ImprovementCheck verify_improvement(const EconomySpec& spec, const ActionProfile& a,
                                    const Vector& d, double delta);

struct ParetoWeights {
  Vector theta;  // left Perron vector of B(a), unit 1-norm
  double foc_residual = 0.0;  // ||theta^T Jn(a)||_inf with rows normalized to J_ii = -1
};

/// Throws NotEfficient outside the Pareto band, or when the planner
/// first-order residual exceeds `tol.foc`.
ParetoWeights pareto_weights(const EconomySpec& spec, const ActionProfile& a,
                             const Tolerances& tol = {});

/// Row-normalized Jacobian: row i divided by -J_ii so the diagonal is -1.
Matrix normalized_jacobian(const JacobianMatrix& J, const Tolerances& tol = {});

struct CoreCheckOptions {
  std::size_t grid = 15;  // points per axis, including both ends
  double radius = 0.0;    // search box [0, radius]^|S|
  double floor = 1e-9;    // substitute for zero efforts under log utilities
  std::size_t max_agents = 6;
};

struct BlockingCoalition {
  std::vector<std::size_t> members;  // 0-based, ascending
  Vector deviation;                  // full profile, outsiders at 0
  Vector gains;                      // u_i(deviation) - u_i(a) for members
};

struct CoreCheckReport {
  std::vector<BlockingCoalition> blocking;  // lexicographic by bitmask
  std::size_t coalitions_checked = 0;
  std::size_t points_evaluated = 0;
  /// Always "no blocking coalition found at this grid resolution" or a list;
  /// a grid search never proves core membership.
  std::string note;
};

/// Grid search over every nonempty coalition (grand coalition included) with
/// outsiders reverting to 0. Throws TooManyAgents above `max_agents`.
CoreCheckReport core_check_bruteforce(const EconomySpec& spec, const ActionProfile& a,
                                      const CoreCheckOptions& opts);

}  // namespace externet
