#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "externet/lindahl.hpp"
#include "externet/model.hpp"

namespace externet {

/// B with row i and column i zeroed: agent i neither gives nor receives.
/// The dimension is kept so agent indices stay stable.
BenefitsMatrix remove_agent(const BenefitsMatrix& B, std::size_t i);

struct AgentRemoval {
  std::size_t agent = 0;  // 0-based
  double rho_without = 0.0;
};

struct EssentialAgentsReport {
  double rho_full = 0.0;
  std::vector<AgentRemoval> per_agent;
  std::vector<std::size_t> essential;  // rho_full > 1 + tau and rho_without < 1 - tau
  std::vector<std::size_t> marginal;   // essential only up to the tolerance band
  double tolerance = 0.0;
};

/// Removal sweep at the status quo. The n spectral radii are computed
/// concurrently; results are ordered by agent. Throws UndefinedAtZero for
/// specs with log terms.
EssentialAgentsReport essential_agents(const EconomySpec& spec, const Tolerances& tol = {});

/// Same sweep for an explicit status-quo benefits matrix.
EssentialAgentsReport essential_agents(const Matrix& B0, const Tolerances& tol = {});

struct CrossTerm {
  std::size_t i = 0;  // 0-based
  std::size_t j = 0;
  double value = 0.0;  // theta_i / theta_j * B_ij(a*) * a*_j
};

struct SeparationReport {
  std::vector<std::size_t> partition;   // M, ascending
  std::vector<std::size_t> complement;  // M^c, ascending
  double bound = 0.0;
  std::vector<CrossTerm> cross_terms;
  bool heuristic_used = false;
  std::optional<double> gap;  // |lambda_2| when the partition came from the heuristic
  std::vector<std::string> notes;
};

/// Upper bound on the cost of separating negotiations into M and M^c at an
/// efficient profile. Throws NotEfficient or BadPartition.
SeparationReport separation_bound(const EconomySpec& spec, const ActionProfile& a_star,
                                  const Vector& theta, const std::vector<std::size_t>& M,
                                  const Tolerances& tol = {});

SeparationReport separation_bound(const EconomySpec& spec, const LindahlCertificate& cert,
                                  const std::vector<std::size_t>& M, const Tolerances& tol = {});

struct PartitionSuggestion {
  std::vector<std::size_t> partition;  // agents on agent 0's side of the sign split
  double gap = 0.0;                    // |lambda_2| of the eigenvalue nearest rho
  double lambda2 = 0.0;                // that eigenvalue's real part
  bool degenerate = false;             // all signs agreed; singleton fallback used
  std::vector<std::string> notes;
};

/// Spectral bisection heuristic: splits agents by the sign pattern of the
/// eigenvector of the second-largest eigenvalue of B (found as the
/// subdominant eigenvector of B + rho I).
PartitionSuggestion suggest_partition(const BenefitsMatrix& B, const Tolerances& tol = {});

}  // namespace externet
