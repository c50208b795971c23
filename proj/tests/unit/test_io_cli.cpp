#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cli.hpp"
#include "externet/errors.hpp"
#include "externet/io.hpp"

using namespace externet;
using nlohmann::json;

namespace {

const std::string kData = EXTERNET_DATA_DIR;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "externet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST_CASE("economy files round trip") {
  for (const char* name : {"figure1.json", "two_agent_log.json", "bonacich.json"}) {
    const auto spec = load_economy(kData + "/" + name);
    CHECK(parse_economy(economy_to_json(spec)) == spec);
  }
}

TEST_CASE("parse_economy errors") {
  CHECK_THROWS_AS(parse_economy("{"), ParseError);
  CHECK_THROWS_AS(parse_economy(R"({"n": 2, "kind": "quadratic"})"), ParseError);
  CHECK_THROWS_AS(parse_economy(R"({"n": 3, "kind": "raw_benefits", "B0": [[0,1],[1,0]]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_economy(R"({"n": 2, "kind": "raw_benefits", "B0": [[0,-1],[1,0]]})"),
                  InvalidSpec);
  CHECK_THROWS_AS(load_economy("/nonexistent/economy.json"), IoError);
}

TEST_CASE("benefits_to_dot") {
  const auto spec = load_economy(kData + "/figure1.json");
  const std::string dot = benefits_to_dot(benefits_at_status_quo(spec).values);
  CHECK(dot.rfind("digraph benefits {", 0) == 0);
  CHECK(dot.find("3 -> 1 [label=\"7\"]") != std::string::npos);
  CHECK(dot.find("4 -> 2 [label=\"0.5\"]") != std::string::npos);
  CHECK(dot.find("1 -> 3") == std::string::npos);

  const std::string empty = benefits_to_dot(Matrix::Zero(4, 4));
  CHECK(empty.find("->") == std::string::npos);
  CHECK(empty.find("  4;") != std::string::npos);

  CHECK(format_significant(2.0 / 3.0, 4) == "0.6667");
}

TEST_CASE("cli: essential on the bundled hub network") {
  const auto r = run_cli({"essential", "--input", kData + "/figure1.json"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["essential"] == json::array({4}));
  CHECK(doc["per_agent"][3]["rho_without"] == 0.0);
  CHECK(doc["rho_full"].get<double>() > 1.0);
  CHECK(doc["tolerances"]["eig"] == 1e-10);
}

TEST_CASE("cli: solve, diagnose, weights, separate, cycles, validate") {
  const std::string two = kData + "/two_agent_log.json";
  const json solved = json::parse(run_cli({"solve", "--input", two}).out);
  CHECK(solved["certificate"]["a_star"][0].get<double>() == doctest::Approx(1.0));
  CHECK(solved["certificate"]["a_star"][1].get<double>() == doctest::Approx(1.0));
  CHECK(solved["verification"]["passed"] == true);

  const json bon = json::parse(run_cli({"solve", "--input", kData + "/bonacich.json"}).out);
  CHECK(bon["certificate"]["a_star"][0].get<double>() == doctest::Approx(2.0));

  const json diag = json::parse(run_cli({"diagnose", "--input", two, "--profile", "1,1"}).out);
  CHECK(diag["efficiency"]["verdict"] == "Efficient");
  const json up = json::parse(run_cli({"diagnose", "--input", two, "--profile", "0.5 0.5"}).out);
  CHECK(up["efficiency"]["verdict"] == "ImprovableUp");

  const json w = json::parse(run_cli({"weights", "--input", two, "--profile", "1,1"}).out);
  CHECK(w["weights"][0].get<double>() == doctest::Approx(0.5));

  const json sep = json::parse(run_cli({"separate", "--input", two, "--partition", "1"}).out);
  CHECK(sep["separation"]["bound"].get<double>() == doctest::Approx(2.0));

  const json cyc = json::parse(run_cli({"cycles", "--input", kData + "/figure1.json", "--lmax", "30"}).out);
  CHECK(cyc["cycles"]["values"].size() == 30);

  const json val = json::parse(run_cli({"validate", "--input", kData + "/figure1.json"}).out);
  CHECK(val["validation"]["passed"] == true);

  const auto table = run_cli({"essential", "--input", kData + "/figure1.json", "--format", "table"});
  CHECK(table.code == 0);
  CHECK(table.out.find("essential") != std::string::npos);
}

TEST_CASE("cli: profile from a file and dot export") {
  const std::string two = kData + "/two_agent_log.json";
  const std::string profile = temp_file("externet_profile.json", "[1.0, 1.0]");
  const json diag = json::parse(run_cli({"diagnose", "--input", two, "--profile", profile}).out);
  CHECK(diag["efficiency"]["verdict"] == "Efficient");

  const auto dot = (std::filesystem::temp_directory_path() / "externet_test.dot").string();
  std::filesystem::remove(dot);
  CHECK(run_cli({"essential", "--input", kData + "/figure1.json", "--dot", dot}).code == 0);
  CHECK(std::filesystem::exists(dot));
}

TEST_CASE("cli: exit codes") {
  const std::string two = kData + "/two_agent_log.json";
  CHECK(run_cli({"bogus", "--input", two}).code == 1);
  CHECK(run_cli({"diagnose"}).code == 1);
  CHECK(run_cli({"diagnose", "--input", "/nonexistent.json"}).code == 1);
  CHECK(run_cli({"diagnose", "--input", two, "--profile", "1,1,1"}).code == 1);
  CHECK(run_cli({"separate", "--input", two}).code == 1);
  CHECK(run_cli({"separate", "--input", two, "--partition", "3"}).code == 1);

  const auto weights = run_cli({"weights", "--input", two, "--profile", "0.5,0.5"});
  CHECK(weights.code == 2);
  CHECK(json::parse(weights.out)["error"]["kind"] == "NotEfficient");
  CHECK_FALSE(weights.err.empty());
  CHECK(run_cli({"essential", "--input", two}).code == 2);
}

TEST_CASE("cli: repeated runs are byte identical") {
  const std::string fig = kData + "/figure1.json";
  const std::string two = kData + "/two_agent_log.json";
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"essential", "--input", fig},
           {"cycles", "--input", fig, "--seed", "7"},
           {"solve", "--input", two, "--seed", "7"},
           {"separate", "--input", fig, "--partition", "auto", "--profile", "1,1,1,1"}}) {
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("cli: EXTERNET_MAX_ITER") {
  const std::string fig = kData + "/figure1.json";
  ::setenv("EXTERNET_MAX_ITER", "123", 1);
  const json doc = json::parse(run_cli({"essential", "--input", fig}).out);
  CHECK(doc["tolerances"]["max_iter"] == 123);
  ::setenv("EXTERNET_MAX_ITER", "many", 1);
  CHECK(run_cli({"essential", "--input", fig}).code == 1);
  ::unsetenv("EXTERNET_MAX_ITER");
}
