#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "externet/model.hpp"

namespace externet {

/// A centrality profile together with the Pareto weights and personalized
/// prices that support it as a Lindahl outcome.
struct LindahlCertificate {
  ActionProfile a_star;
  Vector theta;  // left Perron vector of B(a*), unit 1-norm
  Matrix P;      // P_ij = theta_i J_ij / (-J_ii), so P_ii = -theta_i

  double residual_centrality = 0.0;  // ||B(a*) a* - a*||_inf
  double residual_budget = 0.0;      // max_i |sum_{j!=i} P_ij a_j - a_i sum_{j!=i} P_ji|
  double residual_price = 0.0;       // ||P a*||_inf
  double residual_rho = 0.0;         // |rho(B(a*)) - 1|

  /// Set when B is profile-independent with rho = 1: every positive
  /// multiple of a* is a solution and ||a*||_1 was pinned to ||init||_1.
  bool scale_free = false;
  std::size_t iterations = 0;
  std::string method;  // "newton", "fixed-point", "perron"
};

/// a = (I - alpha G)^{-1} h with h_i = sum_j H_ij. Throws SpectralBound when
/// alpha rho(G) >= 1 - 1e-9 and NonPositive when some h_i = 0.
ActionProfile solve_family_closed_form(double alpha, const Matrix& G, const Matrix& H,
                                       const Tolerances& tol = {});

struct SolveOptions {
  std::optional<ActionProfile> init;  // default: closed form for the family, else ones
  std::size_t max_newton = 100;
  std::size_t max_halvings = 40;
  std::size_t max_fixed_point = 100000;
  double damping = 0.5;
  /// When set, failed solves restart from seeded random interior points.
  std::optional<std::uint64_t> seed;
  std::size_t restarts = 8;
};

/// Solves B(a) a = a by damped Newton (finite-difference Jacobian of
/// F(a) = B(a)a - a, backtracking to stay interior), falling back to damped
/// fixed-point iteration. Throws NoConvergence with the best iterate,
/// LeftDomain when iterates cannot stay interior, or NoSolution for a
/// constant B with rho != 1.
LindahlCertificate solve_centrality(const EconomySpec& spec, const SolveOptions& opts = {},
                                    const Tolerances& tol = {});

/// Rows of J(a*) rescaled to J_ii = -1, then P = diag(theta) J.
Matrix lindahl_prices(const EconomySpec& spec, const ActionProfile& a_star, const Vector& theta,
                      const Tolerances& tol = {});

/// Residuals of a (profile, weights, prices) triple, recomputed from scratch.
LindahlCertificate make_certificate(const EconomySpec& spec, const ActionProfile& a_star,
                                    const Vector& theta, const Matrix& P, const Tolerances& tol = {});

struct LindahlCheck {
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct LindahlVerification {
  LindahlCheck budget;      // budget exhaustion, both forms
  LindahlCheck mrs;         // price ratios equal marginal rates of substitution
  LindahlCheck rho;         // rho(B(a*)) = 1
  LindahlCheck centrality;  // B(a*) a* = a*
  bool passed = false;
  std::vector<std::string> notes;
};

/// First-order verification of a certificate. Optimality is checked through
/// price ratios and budget exhaustion, which is sufficient under concavity.
LindahlVerification verify_lindahl(const EconomySpec& spec, const LindahlCertificate& cert,
                                   const Tolerances& tol = {});

}  // namespace externet
