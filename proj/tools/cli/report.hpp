#pragma once

#include "cpsdiag/sim.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cpsdiag::cli {

/// Contents of summary.json.
struct RunReport {
  std::string scenario;
  std::string version;
  Verdict verdict;
  double delta_rel = 0.0;
  double trailing_eta_hat_norm = 0.0;
  std::size_t trailing_samples = 0;
  std::optional<double> sliding_time;
  double eta_bound = 0.0;
  bool certified = false;
  std::vector<std::string> warnings;
  std::size_t steps = 0;
  double dt = 0.0;
  double final_time = 0.0;
  Vector x;
  Vector x_hat;
  Vector eta;
  Vector eta_hat;
  double residual = 0.0;
  /// Artifact role -> file name relative to the output directory.
  std::map<std::string, std::string> artifacts;
  /// Fully expanded scenario configuration.
  nlohmann::json config;
};

RunReport make_report(const Scenario& scenario, const Trajectory& trajectory);

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

/// Scalars become numbers or booleans where they parse as such.
nlohmann::json yaml_to_json(const YAML::Node& node);

/// "t,x1..xn,xhat1..xhatn,eta1..etan,etahat1..etahatn,residual"
std::string trajectory_header(Index n);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// One row per recorded metric sample: t,M,dist_B,dist_E.
void write_metric_csv(std::ostream& out, const Trajectory& trajectory);

/// Writes trajectory.csv, metric.csv, scenario.yaml and summary.json into `dir`.
/// Fills `report.artifacts`.
void write_run_artifacts(const std::filesystem::path& dir, const Scenario& scenario,
                         const Trajectory& trajectory, RunReport& report);

/// Plot-ready series: fig_states.csv, fig_eta.csv, fig_metric.csv.
void write_figure_csvs(const std::filesystem::path& dir, const Trajectory& trajectory,
                       RunReport& report);

/// One-line human summary printed by the CLI.
std::string verdict_line(const RunReport& report);

}  // namespace cpsdiag::cli
