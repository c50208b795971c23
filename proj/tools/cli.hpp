#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "externet/tolerances.hpp"

namespace externet::cli {

enum class Command { Diagnose, Solve, Weights, Essential, Separate, Cycles, Validate };
enum class OutputFormat { Json, Table };

struct RunConfig {
  Command command = Command::Diagnose;
  std::string input_path;
  std::optional<std::vector<double>> profile;
  /// 1-based agent ids; empty with `auto_partition` set asks for the heuristic.
  std::vector<std::size_t> partition;
  bool auto_partition = false;
  Tolerances tolerances;
  OutputFormat format = OutputFormat::Json;
  std::optional<std::string> dot_path;
  std::optional<std::uint64_t> seed;
  std::size_t lmax = 60;
};

/// Parses argv into a config. Throws UsageError (exit code 1) on bad input.
/// Returns nullopt when help was requested and printed to `out`.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Reads `--profile` values: a path to a file holding a JSON array or
/// comma/space-separated numbers, or an inline list like "1,2.5,3".
std::vector<double> parse_profile(const std::string& value);

std::vector<std::size_t> parse_partition(const std::string& value);

/// Runs one command; the report goes to `out`, diagnostics to `err`.
/// Returns 0 on success, 1 on input errors, 2 on analysis errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run, with usage errors mapped to exit code 1.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace externet::cli
