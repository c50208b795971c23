#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "externet/externet.hpp"
#include "json.hpp"

namespace externet::cli {
namespace {

using json = nlohmann::json;

const char* command_name(Command c) {
  switch (c) {
    case Command::Diagnose:
      return "diagnose";
    case Command::Solve:
      return "solve";
    case Command::Weights:
      return "weights";
    case Command::Essential:
      return "essential";
    case Command::Separate:
      return "separate";
    case Command::Cycles:
      return "cycles";
    case Command::Validate:
      return "validate";
  }
  return "?";
}

json vec(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json mat(const Matrix& M) {
  json out = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) out.push_back(vec(M.row(i).transpose()));
  return out;
}

json agents(const std::vector<std::size_t>& idx) {
  json out = json::array();
  for (std::size_t i : idx) out.push_back(i + 1);
  return out;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json check_json(const LindahlCheck& c) {
  return {{"passed", c.passed}, {"value", number_or_null(c.value)}, {"tolerance", c.tolerance}};
}

json certificate_json(const LindahlCertificate& cert) {
  return {{"a_star", vec(cert.a_star.values())},
          {"theta", vec(cert.theta)},
          {"P", mat(cert.P)},
          {"residuals",
           {{"centrality", cert.residual_centrality},
            {"budget", cert.residual_budget},
            {"price", cert.residual_price},
            {"rho", cert.residual_rho}}},
          {"scale_free", cert.scale_free},
          {"method", cert.method},
          {"iterations", cert.iterations}};
}

json efficiency_json(const EfficiencyReport& r) {
  json out = {{"verdict", to_string(r.verdict)},
              {"rho", number_or_null(r.rho)},
              {"profile", vec(r.profile.values())},
              {"direction", r.direction ? vec(*r.direction) : json(nullptr)},
              {"weights", r.weights ? vec(*r.weights) : json(nullptr)},
              {"tolerance", r.tolerance},
              {"notes", r.notes}};
  return out;
}

Vector profile_vector(const RunConfig& config, std::size_t n) {
  const auto& p = *config.profile;
  if (p.size() != n) {
    throw DimensionError("profile has " + std::to_string(p.size()) + " entries, economy has " +
                         std::to_string(n) + " agents");
  }
  return from_std(p);
}

// Efficient profile and weights: the given profile, or the solved Lindahl point.
std::pair<ActionProfile, Vector> efficient_point(const EconomySpec& spec, const RunConfig& config,
                                                 json& doc) {
  const Tolerances& tol = config.tolerances;
  if (config.profile) {
    ActionProfile a(profile_vector(config, spec.agents()));
    return {a, pareto_weights(spec, a, tol).theta};
  }
  SolveOptions opts;
  opts.seed = config.seed;
  LindahlCertificate cert = solve_centrality(spec, opts, tol);
  doc["solved_profile"] = vec(cert.a_star.values());
  return {cert.a_star, cert.theta};
}

Matrix analysis_matrix(const EconomySpec& spec, const RunConfig& config) {
  if (config.profile) {
    return benefits_at(spec, ActionProfile(profile_vector(config, spec.agents())), config.tolerances).values;
  }
  return benefits_at_status_quo(spec, config.tolerances).values;
}

json build_report(const RunConfig& config, const EconomySpec& spec) {
  const Tolerances& tol = config.tolerances;
  const std::size_t n = spec.agents();
  json doc;
  doc["command"] = command_name(config.command);
  doc["version"] = kVersion;
  doc["tolerances"] = {{"eig", tol.eig},       {"pareto", tol.pareto}, {"fix", tol.fix},
                       {"budget", tol.budget}, {"foc", tol.foc},       {"mrs", tol.mrs},
                       {"max_iter", tol.iteration_cap(n)}};
  if (config.seed) doc["seed"] = *config.seed;

  switch (config.command) {
    case Command::Diagnose: {
      EfficiencyReport r;
      if (config.profile) {
        const ActionProfile a(profile_vector(config, n));
        r = a.values().isZero(0.0) ? classify_status_quo(spec, tol) : classify_interior(spec, a, tol);
      } else {
        r = classify_status_quo(spec, tol);
      }
      doc["efficiency"] = efficiency_json(r);
      break;
    }
    case Command::Solve: {
      SolveOptions opts;
      opts.seed = config.seed;
      if (config.profile) opts.init = ActionProfile(profile_vector(config, n));
      const LindahlCertificate cert = solve_centrality(spec, opts, tol);
      const LindahlVerification v = verify_lindahl(spec, cert, tol);
      doc["certificate"] = certificate_json(cert);
      doc["verification"] = {{"passed", v.passed},
                             {"budget", check_json(v.budget)},
                             {"mrs", check_json(v.mrs)},
                             {"rho", check_json(v.rho)},
                             {"centrality", check_json(v.centrality)},
                             {"notes", v.notes}};
      break;
    }
    case Command::Weights: {
      ActionProfile a;
      if (config.profile) {
        a = ActionProfile(profile_vector(config, n));
      } else {
        SolveOptions opts;
        opts.seed = config.seed;
        a = solve_centrality(spec, opts, tol).a_star;
      }
      const ParetoWeights w = pareto_weights(spec, a, tol);
      doc["profile"] = vec(a.values());
      doc["weights"] = vec(w.theta);
      doc["foc_residual"] = w.foc_residual;
      break;
    }
    case Command::Essential: {
      const EssentialAgentsReport r = essential_agents(spec, tol);
      doc["rho_full"] = r.rho_full;
      json per = json::array();
      for (const auto& p : r.per_agent) per.push_back({{"agent", p.agent + 1}, {"rho_without", p.rho_without}});
      doc["per_agent"] = per;
      doc["essential"] = agents(r.essential);
      doc["marginal"] = agents(r.marginal);
      break;
    }
    case Command::Separate: {
      auto [a, theta] = efficient_point(spec, config, doc);
      std::vector<std::size_t> M;
      std::optional<PartitionSuggestion> suggestion;
      if (config.auto_partition) {
        suggestion = suggest_partition(benefits_at(spec, a, tol), tol);
        M = suggestion->partition;
      } else {
        for (std::size_t id : config.partition) {
          if (id == 0 || id > n) throw BadPartition("agent id " + std::to_string(id) + " is out of range");
          M.push_back(id - 1);
        }
      }
      SeparationReport r = separation_bound(spec, a, theta, M, tol);
      json terms = json::array();
      for (const auto& t : r.cross_terms) terms.push_back({{"i", t.i + 1}, {"j", t.j + 1}, {"value", t.value}});
      json sep = {{"partition", agents(r.partition)},
                  {"complement", agents(r.complement)},
                  {"bound", r.bound},
                  {"cross_terms", terms},
                  {"heuristic_used", suggestion.has_value()},
                  {"notes", r.notes}};
      if (suggestion) {
        sep["gap"] = suggestion->gap;
        sep["lambda2"] = suggestion->lambda2;
        sep["degenerate"] = suggestion->degenerate;
        for (const auto& note : suggestion->notes) sep["notes"].push_back(note);
      }
      doc["separation"] = sep;
      break;
    }
    case Command::Cycles: {
      const Matrix B = analysis_matrix(spec, config);
      const std::vector<double> values = cycle_value_estimate(B, config.lmax);
      doc["cycles"] = {{"lmax", config.lmax},
                       {"values", values},
                       {"running_max", trailing_max(values, n)},
                       {"spectral_radius", spectral_radius(B, tol)}};
      break;
    }
    case Command::Validate: {
      std::vector<ActionProfile> samples;
      if (config.profile) samples.emplace_back(profile_vector(config, n));
      const ValidationReport r = validate(spec, samples, tol);
      json list = json::array();
      for (const auto& s : r.samples) {
        list.push_back({{"profile", vec(s.profile)},
                        {"costly_actions", s.costly_actions},
                        {"positive_externalities", s.positive_externalities},
                        {"irreducible", s.irreducible},
                        {"failures", s.failures}});
      }
      doc["validation"] = {{"passed", r.passed}, {"samples", list}};
      break;
    }
  }

  if (config.dot_path) export_dot(analysis_matrix(spec, config), *config.dot_path);
  return doc;
}

void flatten(const json& node, const std::string& prefix, std::ostream& out) {
  auto scalar = [](const json& v) -> std::string {
    if (v.is_number_float()) return format_significant(v.get<double>(), 6);
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
    return;
  }
  if (node.is_array() && std::all_of(node.begin(), node.end(), [](const json& v) { return v.is_primitive(); })) {
    out << prefix << ":";
    for (const auto& v : node) out << " " << scalar(v);
    out << "\n";
    return;
  }
  if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) flatten(node[i], prefix + "[" + std::to_string(i + 1) + "]", out);
    return;
  }
  out << prefix << ": " << scalar(node) << "\n";
}

void emit(const json& doc, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::Json) {
    out << doc.dump(2) << "\n";
  } else {
    flatten(doc, "", out);
  }
}

}  // namespace

std::vector<double> parse_profile(const std::string& value) {
  std::string text = value;
  std::error_code ec;
  if (std::filesystem::is_regular_file(value, ec)) {
    std::ifstream in(value);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
      try {
        return json::parse(text).get<std::vector<double>>();
      } catch (const json::exception& e) {
        throw ParseError(std::string("profile file is not a JSON number array: ") + e.what());
      }
    }
  }
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\t' || c == '\r') c = ' ';
  }
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ParseError("profile entry \"" + token + "\" is not a number");
    }
  }
  if (out.empty()) throw ParseError("profile is empty");
  return out;
}

std::vector<std::size_t> parse_partition(const std::string& value) {
  std::string text = value;
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(text);
  std::vector<std::size_t> out;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      const long long id = std::stoll(token, &used);
      if (used != token.size() || id < 1) throw std::invalid_argument(token);
      out.push_back(static_cast<std::size_t>(id));
    } catch (const std::exception&) {
      throw ParseError("partition entry \"" + token + "\" is not a positive agent id");
    }
  }
  if (out.empty()) throw ParseError("partition is empty");
  return out;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Spectral diagnostics for public-goods economies", "externet"};
  RunConfig config;

  std::string command;
  std::string profile;
  std::string partition;
  std::string format = "json";
  std::string dot;
  std::uint64_t seed = 0;
  double tol_eig = config.tolerances.eig;
  double tol_pareto = config.tolerances.pareto;
  double tol_fix = config.tolerances.fix;

  app.add_option("command", command, "diagnose | solve | weights | essential | separate | cycles | validate")
      ->required()
      ->check(CLI::IsMember({"diagnose", "solve", "weights", "essential", "separate", "cycles", "validate"}));
  app.add_option("--input", config.input_path, "Economy JSON file")->required();
  app.add_option("--profile", profile, "Action profile: file or inline list such as 1,2,3");
  app.add_option("--partition", partition, "1-based agent ids such as 1,2,5, or 'auto'");
  app.add_option("--tol-eig", tol_eig, "Perron residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-pareto", tol_pareto, "Band around rho = 1")->check(CLI::PositiveNumber);
  app.add_option("--tol-fix", tol_fix, "Centrality residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "json | table")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--dot", dot, "Write the benefits network as DOT");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for solver restarts");
  app.add_option("--lmax", config.lmax, "Longest cycle length for 'cycles'")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  static const std::pair<const char*, Command> kCommands[] = {
      {"diagnose", Command::Diagnose}, {"solve", Command::Solve},         {"weights", Command::Weights},
      {"essential", Command::Essential}, {"separate", Command::Separate}, {"cycles", Command::Cycles},
      {"validate", Command::Validate}};
  for (const auto& [name, value] : kCommands) {
    if (command == name) config.command = value;
  }

  if (!profile.empty()) config.profile = parse_profile(profile);
  if (!partition.empty()) {
    if (partition == "auto") {
      config.auto_partition = true;
    } else {
      config.partition = parse_partition(partition);
    }
  }
  if (config.command == Command::Separate && partition.empty()) {
    throw UsageError("'separate' requires --partition (agent ids or 'auto')");
  }
  config.tolerances.eig = tol_eig;
  config.tolerances.pareto = tol_pareto;
  config.tolerances.fix = tol_fix;
  config.format = format == "table" ? OutputFormat::Table : OutputFormat::Json;
  if (!dot.empty()) config.dot_path = dot;
  if (seed_opt->count() > 0) config.seed = seed;

  if (const char* env = std::getenv("EXTERNET_MAX_ITER")) {
    try {
      std::size_t used = 0;
      const long long cap = std::stoll(env, &used);
      if (used != std::string(env).size() || cap <= 0) throw std::invalid_argument(env);
      config.tolerances.max_iter = static_cast<std::size_t>(cap);
    } catch (const std::exception&) {
      throw UsageError(std::string("EXTERNET_MAX_ITER must be a positive integer, got \"") + env + "\"");
    }
  }
  return config;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const EconomySpec spec = load_economy(config.input_path);
    emit(build_report(config, spec), config.format, out);
    return 0;
  } catch (const Error& e) {
    json doc = {{"command", command_name(config.command)},
                {"version", kVersion},
                {"error", {{"kind", e.kind()}, {"message", e.what()}, {"indices", agents(e.indices())}}}};
    emit(doc, config.format, out);
    err << "externet: " << e.kind() << ": " << e.what() << "\n";
    return e.category() == ErrorCategory::Input ? 1 : 2;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    config = parse_args(argc, argv, out);
  } catch (const Error& e) {
    err << "externet: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }
  if (!config) return 0;
  return run(*config, out, err);
}

}  // namespace externet::cli
