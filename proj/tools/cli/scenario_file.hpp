#pragma once

#include "cpsdiag/errors.hpp"
#include "cpsdiag/sim.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <string>
#include <vector>

namespace cpsdiag::cli {

/// Parse failure addressed by field path, e.g. "[plant].A row 1".
class ParseError : public ValidationError {
 public:
  ParseError(std::string field, const std::string& message, int line = -1);

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

/// A dotted-path override such as "sim.dt=5e-5".
struct Override {
  std::vector<std::string> path;
  std::string value;

  static Override parse(const std::string& text);
};

/// Loads a YAML document from disk; ParseError on unreadable or malformed files.
YAML::Node load_document(const std::filesystem::path& path);
YAML::Node parse_document(const std::string& text);

/// Applies overrides in order; values are parsed as YAML scalars or flow sequences.
void apply_overrides(YAML::Node& root, const std::vector<Override>& overrides);

/// Builds a validated Scenario. Every key is checked; unknown keys are rejected.
Scenario build_scenario(const YAML::Node& root);

/// Reads only the [plant] section (other known sections are ignored).
PlantModel build_plant(const YAML::Node& root);

/// Inverse of build_scenario for reproducible echoes: derived defaults are written out.
YAML::Node scenario_to_yaml(const Scenario& scenario);
YAML::Node signal_to_yaml(const Signal& signal);
YAML::Node matrix_to_yaml(const Matrix& m);

/// Parses a matrix literal: "identity", "diag:a,b,..." or rows "a,b;c,d".
Matrix parse_matrix_literal(const std::string& text, Index n, const std::string& field);
Vector parse_vector_literal(const std::string& text, const std::string& field);

}  // namespace cpsdiag::cli
