#pragma once

#include <cstddef>
#include <vector>

#include "externet/matrix.hpp"
#include "externet/tolerances.hpp"

namespace externet {

/// Spectral radius with left and right Perron vectors, each normalized to
/// unit 1-norm.
struct PerronPair {
  double radius = 0.0;
  Vector right;
  Vector left;
  std::size_t iterations = 0;
  double residual = 0.0;  // max(||M r - rho r||_inf, ||l M - rho l||_inf)
};

/// True iff the digraph with an edge j -> i whenever M_ij > 0 is strongly
/// connected. A 1x1 matrix counts as irreducible.
bool is_irreducible(const Matrix& M);

/// Strongly connected components of the positive support, in an order where
/// each component appears before the components it reaches.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Matrix& M);

/// True iff the positive support (self-loops included) contains no cycle,
/// which makes M nilpotent.
bool has_acyclic_support(const Matrix& M);

/// rho(M) for a nonnegative square matrix. Exactly 0 for acyclic support;
/// otherwise the maximum over strongly connected components of their Perron
/// roots.
double spectral_radius(const Matrix& M, const Tolerances& tol = {});

/// Perron root and vectors of an irreducible nonnegative matrix. Throws
/// NotIrreducible or NoConvergence.
PerronPair perron_pair(const Matrix& M, const Tolerances& tol = {});

/// [trace(M^l)^(1/l) for l = 1..lmax], computed with per-step rescaling.
std::vector<double> cycle_value_estimate(const Matrix& M, std::size_t lmax);

/// Running maximum of `values` over a trailing window of `window` entries.
/// Tracks rho(M) once the window covers the cycle period.
std::vector<double> trailing_max(const std::vector<double>& values, std::size_t window);

struct SubdominantEstimate {
  double magnitude = 0.0;
  Vector vector;            // real part of an associated eigenvector, unit 2-norm
  bool complex_pair = false;
  std::size_t iterations = 0;
};

/// |lambda_2| of an irreducible nonnegative matrix via deflation
/// M - rho r l^T / (l^T r) followed by power iteration. A rotating complex
/// pair falls back to a two-step recurrence fit for the magnitude.
SubdominantEstimate subdominant_magnitude(const Matrix& M, const Tolerances& tol = {});

}  // namespace externet
