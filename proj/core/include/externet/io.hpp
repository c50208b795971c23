#pragma once

#include <string>

#include "externet/model.hpp"

namespace externet {

/// Parses the economy file format:
///   { "n": int, "kind": "linear_log" | "raw_benefits",
///     "alpha": float, "G": [[...]], "H": [[...]], "B0": [[...]] }
/// Rows index the beneficiary i, columns the provider j. Throws ParseError
/// for malformed documents and InvalidSpec for invariant violations.
EconomySpec parse_economy(const std::string& text);

EconomySpec load_economy(const std::string& path);

/// Inverse of parse_economy for the file-backed kinds. Numbers are written
/// in shortest round-trip form. Oracle-backed specs have no file form.
std::string economy_to_json(const EconomySpec& spec);

/// Directed graph with an edge j -> i (provider to beneficiary) labelled by
/// B_ij to 4 significant digits. Nodes are numbered from 1.
std::string benefits_to_dot(const Matrix& B);

/// Writes benefits_to_dot(B) to `path`. Throws IoError.
void export_dot(const Matrix& B, const std::string& path);

/// "%.4g"-style formatting used for edge labels.
std::string format_significant(double value, int digits);

}  // namespace externet
