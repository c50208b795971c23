#include "externet/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "externet/errors.hpp"
#include "json.hpp"

namespace externet {
namespace {

using json = nlohmann::json;

Matrix matrix_from_json(const json& doc, const char* key, std::size_t n) {
  if (!doc.contains(key)) return Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const json& rows = doc.at(key);
  if (!rows.is_array() || rows.size() != n) {
    throw ParseError(std::string("\"") + key + "\" must be a list of " + std::to_string(n) + " rows");
  }
  Matrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != n) {
      throw ParseError(std::string("row ") + std::to_string(i + 1) + " of \"" + key + "\" must have " +
                           std::to_string(n) + " entries",
                       {i});
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!row[j].is_number()) {
        throw ParseError(std::string("\"") + key + "\" entry (" + std::to_string(i + 1) + "," +
                             std::to_string(j + 1) + ") is not a number",
                         {i, j});
      }
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return M;
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

EconomySpec parse_economy(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("economy file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("economy file must be a JSON object");
  if (!doc.contains("n") || !doc.at("n").is_number_integer() || doc.at("n").get<long long>() < 1) {
    throw ParseError("\"n\" must be a positive integer");
  }
  if (!doc.contains("kind") || !doc.at("kind").is_string()) throw ParseError("\"kind\" must be a string");
  const auto n = static_cast<std::size_t>(doc.at("n").get<long long>());
  const std::string kind = doc.at("kind").get<std::string>();

  if (kind == "linear_log") {
    double alpha = 0.0;
    if (doc.contains("alpha")) {
      if (!doc.at("alpha").is_number()) throw ParseError("\"alpha\" must be a number");
      alpha = doc.at("alpha").get<double>();
    }
    return EconomySpec::linear_log(alpha, matrix_from_json(doc, "G", n), matrix_from_json(doc, "H", n));
  }
  if (kind == "raw_benefits") {
    if (!doc.contains("B0")) throw ParseError("raw_benefits economies need \"B0\"");
    return EconomySpec::raw_benefits(matrix_from_json(doc, "B0", n));
  }
  throw ParseError("unknown economy kind \"" + kind + "\"");
}

EconomySpec load_economy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open economy file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_economy(buf.str());
}

std::string economy_to_json(const EconomySpec& spec) {
  json doc;
  doc["n"] = spec.agents();
  if (const auto* p = spec.linear_log_payload()) {
    doc["kind"] = "linear_log";
    doc["alpha"] = p->alpha;
    doc["G"] = matrix_to_json(p->G);
    doc["H"] = matrix_to_json(p->H);
  } else if (const auto* p = spec.raw_payload()) {
    doc["kind"] = "raw_benefits";
    doc["B0"] = matrix_to_json(p->B0);
  } else {
    throw InvalidSpec("oracle-backed economies have no file form");
  }
  return doc.dump(2);
}

std::string format_significant(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

std::string benefits_to_dot(const Matrix& B) {
  std::ostringstream out;
  out << "digraph benefits {\n";
  for (Eigen::Index i = 0; i < B.rows(); ++i) out << "  " << i + 1 << ";\n";
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
      if (i == j || B(i, j) == 0.0) continue;
      out << "  " << j + 1 << " -> " << i + 1 << " [label=\"" << format_significant(B(i, j), 4)
          << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

void export_dot(const Matrix& B, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write DOT file " + path);
  out << benefits_to_dot(B);
  if (!out) throw IoError("failed writing DOT file " + path);
}

}  // namespace externet
