#pragma once

#include <cstddef>

namespace externet {

/// Numerical thresholds shared by every module. Defaults are the values the
/// library is validated against; the CLI lets users override a subset.
struct Tolerances {
  double eig = 1e-10;      // Perron residual and spectral-radius accuracy
  double pareto = 1e-8;    // band around rho = 1 counted as efficient
  double fix = 1e-10;      // ||B(a)a - a||_inf at a centrality profile
  double budget = 1e-8;    // budget exhaustion residual
  double foc = 1e-8;       // ||theta^T J||_inf planner first-order conditions
  double mrs = 1e-8;       // price ratio vs marginal-rate-of-substitution gap
  double fd_step = 1e-6;   // relative finite-difference step
  double fd_noise = 1e-7;  // off-diagonal slack for finite-difference Jacobians
  double sing = 1e-12;     // guard on |J_ii|
  double shift = 1e-3;     // power-iteration diagonal shift (times max entry)

  /// Iteration cap for eigen-solvers, 0 means the size-dependent default
  /// 100 n + 10000.
  std::size_t max_iter = 0;

  std::size_t iteration_cap(std::size_t n) const {
    return max_iter != 0 ? max_iter : 100 * n + 10000;
  }
};

}  // namespace externet
