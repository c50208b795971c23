#include "externet/structure.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "externet/efficiency.hpp"
#include "externet/errors.hpp"
#include "externet/spectral.hpp"

namespace externet {

BenefitsMatrix remove_agent(const BenefitsMatrix& B, std::size_t i) {
  const auto n = static_cast<std::size_t>(B.values.rows());
  if (i >= n) {
    throw IndexOutOfRange("agent " + std::to_string(i + 1) + " is out of range for " +
                              std::to_string(n) + " agents",
                          {i});
  }
  BenefitsMatrix out = B;
  const auto k = static_cast<Eigen::Index>(i);
  out.values.row(k).setZero();
  out.values.col(k).setZero();
  return out;
}

EssentialAgentsReport essential_agents(const Matrix& B0, const Tolerances& tol) {
  const auto n = static_cast<std::size_t>(B0.rows());
  EssentialAgentsReport report;
  report.tolerance = tol.pareto;
  report.rho_full = spectral_radius(B0, tol);

  const BenefitsMatrix full{B0, Vector::Zero(static_cast<Eigen::Index>(n))};
  std::vector<std::future<double>> pending;
  pending.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pending.push_back(std::async(std::launch::async, [&full, &tol, i] {
      return spectral_radius(remove_agent(full, i).values, tol);
    }));
  }
  for (std::size_t i = 0; i < n; ++i) report.per_agent.push_back({i, pending[i].get()});

  const double tau = tol.pareto;
  for (const auto& r : report.per_agent) {
    if (report.rho_full > 1.0 + tau && r.rho_without < 1.0 - tau) {
      report.essential.push_back(r.agent);
    } else if (report.rho_full >= 1.0 - tau && r.rho_without <= 1.0 + tau &&
               (report.rho_full <= 1.0 + tau || r.rho_without >= 1.0 - tau)) {
      report.marginal.push_back(r.agent);
    }
  }
  return report;
}

EssentialAgentsReport essential_agents(const EconomySpec& spec, const Tolerances& tol) {
  return essential_agents(benefits_at_status_quo(spec, tol).values, tol);
}

namespace {

std::vector<std::size_t> checked_partition(const std::vector<std::size_t>& M, std::size_t n,
                                           std::vector<bool>& in_m) {
  in_m.assign(n, false);
  for (std::size_t i : M) {
    if (i >= n) throw BadPartition("agent " + std::to_string(i + 1) + " is out of range", {i});
    if (in_m[i]) throw BadPartition("agent " + std::to_string(i + 1) + " is listed twice", {i});
    in_m[i] = true;
  }
  if (M.empty() || M.size() == n) {
    throw BadPartition("partition must be a nonempty proper subset of the agents");
  }
  std::vector<std::size_t> sorted = M;
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

}  // namespace

SeparationReport separation_bound(const EconomySpec& spec, const ActionProfile& a_star,
                                  const Vector& theta, const std::vector<std::size_t>& M,
                                  const Tolerances& tol) {
  const std::size_t n = spec.agents();
  std::vector<bool> in_m;
  SeparationReport report;
  report.partition = checked_partition(M, n, in_m);
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_m[i]) report.complement.push_back(i);
  }
  if (static_cast<std::size_t>(theta.size()) != n) throw DimensionError("theta has the wrong length");
  if (!(theta.array() > 0.0).all()) throw DomainError("theta must be positive");

  // Benefits are invariant to the J_ii = -1 row normalization.
  const Matrix B = benefits_at(spec, a_star, tol).values;
  const double rho = spectral_radius(B, tol);
  if (std::abs(rho - 1.0) > tol.pareto) {
    throw NotEfficient("rho(B(a*)) = " + std::to_string(rho) + " is outside the Pareto band");
  }

  const Vector& a = a_star.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (in_m[i] == in_m[j]) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const double value = theta(ii) / theta(jj) * B(ii, jj) * a(jj);
      report.cross_terms.push_back({i, j, value});
      report.bound += value;
    }
  }
  if (spec.kind() == EconomyKind::OracleBacked) {
    report.notes.push_back(
        "bound assumes a numeraire entering utilities additively; not verified for oracle utilities");
  }
  return report;
}

SeparationReport separation_bound(const EconomySpec& spec, const LindahlCertificate& cert,
                                  const std::vector<std::size_t>& M, const Tolerances& tol) {
  return separation_bound(spec, cert.a_star, cert.theta, M, tol);
}

PartitionSuggestion suggest_partition(const BenefitsMatrix& B, const Tolerances& tol) {
  const auto n = static_cast<std::size_t>(B.values.rows());
  if (n < 2) throw DimensionError("partitioning needs at least two agents");
  const PerronPair pp = perron_pair(B.values, tol);

  // Shifting by rho turns "closest to rho" into "largest magnitude" among the
  // non-Perron eigenvalues, so bipartite-like -rho modes do not win.
  const Matrix shifted = B.values + pp.radius * Matrix::Identity(B.values.rows(), B.values.cols());
  const SubdominantEstimate sub = subdominant_magnitude(shifted, tol);

  PartitionSuggestion out;
  out.lambda2 = sub.magnitude - pp.radius;
  out.gap = std::abs(out.lambda2);
  if (sub.complex_pair) out.notes.push_back("subdominant eigenvalue is a complex pair; gap is approximate");

  const Vector& v = sub.vector;
  const double scale = v.cwiseAbs().maxCoeff();
  std::vector<std::size_t> pos, neg, zero;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = v(static_cast<Eigen::Index>(i));
    if (std::abs(x) <= 1e-9 * scale) {
      zero.push_back(i);
    } else {
      (x > 0.0 ? pos : neg).push_back(i);
    }
  }

  if (pos.empty() || neg.empty()) {
    Eigen::Index top = 0;
    v.cwiseAbs().maxCoeff(&top);
    out.partition = {static_cast<std::size_t>(top)};
    out.degenerate = true;
    out.notes.push_back("DegeneratePartition: eigenvector signs agree; using a singleton split");
    return out;
  }

  const bool zero_in_pos = pos.size() < neg.size() ||
                           (pos.size() == neg.size() && !pos.empty() && pos.front() == 0);
  auto& target = zero_in_pos ? pos : neg;
  target.insert(target.end(), zero.begin(), zero.end());
  std::sort(target.begin(), target.end());

  out.partition = std::find(pos.begin(), pos.end(), std::size_t{0}) != pos.end() ? pos : neg;
  out.notes.push_back("heuristic spectral split; not an optimized partition");
  return out;
}

}  // namespace externet
