#include "cli/commands.hpp"

#include "cpsdiag/design.hpp"
#include "cpsdiag/distinguisher.hpp"
#include "cpsdiag/reference_scenarios.hpp"
#include "cpsdiag/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <thread>

namespace cpsdiag::cli {
namespace {

struct CommonOptions {
  std::string out_dir = "out";
  bool json = false;
  unsigned jobs = 0;
  std::vector<std::string> sets;

  std::vector<Override> overrides() const {
    std::vector<Override> o;
    for (const auto& s : sets) o.push_back(Override::parse(s));
    return o;
  }
  unsigned worker_count() const {
    return jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
  }
};

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

void print_matrix(std::ostream& out, const char* name, const Matrix& m) {
  out << name << " =\n";
  for (Index r = 0; r < m.rows(); ++r) {
    out << "  ";
    for (Index c = 0; c < m.cols(); ++c) out << std::setw(14) << m(r, c) + 0.0;
    out << '\n';
  }
}

Scenario scenario_from_file(const std::string& file, const std::vector<Override>& overrides) {
  YAML::Node root = load_document(file);
  apply_overrides(root, overrides);
  if (!root["name"]) root["name"] = std::filesystem::path(file).stem().string();
  return build_scenario(root);
}

Scenario reference_with_overrides(const std::string& name, const std::vector<Override>& overrides) {
  Scenario sc = reference::make(name);
  if (overrides.empty()) return sc;
  YAML::Node root = scenario_to_yaml(sc);
  apply_overrides(root, overrides);
  return build_scenario(root);
}

void emit_report(const CommonOptions& opts, const RunReport& r, std::ostream& out) {
  if (opts.json) {
    out << to_json(r).dump(2) << '\n';
  } else {
    out << verdict_line(r) << '\n';
  }
}

PlantModel plant_from(const std::string& scenario_file, const std::string& a, const std::string& b,
                      const std::string& e) {
  if (!scenario_file.empty()) return build_plant(load_document(scenario_file));
  if (a.empty() || b.empty() || e.empty()) {
    throw ValidationError("give --scenario FILE or all of --A, --B, --E");
  }
  Matrix A = parse_matrix_literal(a, -1, "--A");
  Matrix B = parse_matrix_literal(b, -1, "--B");
  Matrix E = parse_matrix_literal(e, -1, "--E");
  return PlantModel(A, B, E);
}

int cmd_simulate(const CommonOptions& opts, const std::string& file, std::ostream& out) {
  Scenario sc = scenario_from_file(file, opts.overrides());
  Trajectory tr = run_scenario(sc);
  RunReport r = make_report(sc, tr);
  write_run_artifacts(opts.out_dir, sc, tr, r);
  emit_report(opts, r, out);
  return kExitOk;
}

int cmd_reproduce(const CommonOptions& opts, std::vector<std::string> cases, bool all,
                  std::ostream& out, std::ostream& err) {
  if (cases.empty()) {
    if (all) {
      for (auto n : reference::names()) cases.emplace_back(n);
    } else {
      cases = {"case1", "case1-fast", "case2"};
    }
  }
  const auto overrides = opts.overrides();
  std::vector<Scenario> scenarios;
  for (const auto& c : cases) scenarios.push_back(reference_with_overrides(c, overrides));
  auto outcomes = run_batch(scenarios, opts.worker_count());

  nlohmann::json all_reports = nlohmann::json::array();
  int code = kExitOk;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (outcomes[i].error) {
      err << cases[i] << ": ";
      const int c = report_exception(outcomes[i].error, err);
      if (code == kExitOk) code = c;
      continue;
    }
    const auto dir = std::filesystem::path(opts.out_dir) / cases[i];
    RunReport r = make_report(scenarios[i], *outcomes[i].trajectory);
    write_figure_csvs(dir, *outcomes[i].trajectory, r);
    write_run_artifacts(dir, scenarios[i], *outcomes[i].trajectory, r);
    if (opts.json) {
      all_reports.push_back(to_json(r));
    } else {
      out << verdict_line(r) << '\n';
    }
  }
  if (opts.json) out << all_reports.dump(2) << '\n';
  return code;
}

int cmd_classify(const CommonOptions& opts, const std::string& scenario_file, const std::string& a,
                 const std::string& b, const std::string& e, const std::string& eta_text,
                 double delta_rel, std::optional<double> delta_abs, std::ostream& out) {
  const PlantModel plant = plant_from(scenario_file, a, b, e);
  const Vector eta = parse_vector_literal(eta_text, "--eta");
  if (eta.size() != plant.states()) {
    throw ValidationError("--eta: expected " + std::to_string(plant.states()) + " entries, got " +
                          std::to_string(eta.size()));
  }
  if (!(delta_rel >= 0.0)) throw ValidationError("--delta-rel must be non-negative");
  const MetricSample s = metric_sample(plant, eta, 0.0, kDefaultMetricFloor);
  const double delta = delta_abs ? *delta_abs : delta_rel * s.eta_norm;
  if (!(delta >= 0.0)) throw ValidationError("--delta must be non-negative");
  const VerdictLabel label = classify(s.value, delta, true);
  if (opts.json) {
    nlohmann::json j{{"metric", s.value},   {"dist_B", s.dist_to_B},
                     {"dist_E", s.dist_to_E}, {"eta_norm", s.eta_norm},
                     {"delta", delta},       {"verdict", std::string(to_string(label))}};
    out << j.dump(2) << '\n';
  } else {
    out << std::setprecision(10) << "M = " << s.value << "  dist_B = " << s.dist_to_B
        << "  dist_E = " << s.dist_to_E << "  delta = " << delta << "\nverdict: "
        << to_string(label) << '\n';
  }
  return kExitOk;
}

int cmd_design(const CommonOptions& opts, const std::string& scenario_file, const std::string& a,
               const std::string& q_text, double M, const std::string& gamma_text,
               const std::string& e0_text, const std::string& gain_file, std::ostream& out) {
  Matrix A;
  if (!scenario_file.empty()) {
    A = build_plant(load_document(scenario_file)).A();
  } else if (!a.empty()) {
    A = parse_matrix_literal(a, -1, "--A");
  } else {
    throw ValidationError("give --scenario FILE or --A");
  }
  if (A.rows() != A.cols()) throw ValidationError("--A: state matrix must be square");
  if (!(M > 0.0) || !std::isfinite(M)) throw ValidationError("--M must be positive and finite");
  const Matrix Q = parse_matrix_literal(q_text, A.rows(), "--Q");
  const Matrix P = solve_lyapunov(A, Q);
  double gamma = default_gamma(P, M);
  if (gamma_text != "auto") {
    gamma = parse_vector_literal(gamma_text, "--gamma")(0);
  }
  const LyapunovCertificate cert = certify(A, Q, gamma, M);
  std::optional<double> t_max;
  if (!e0_text.empty()) {
    const Vector e0 = parse_vector_literal(e0_text, "--e0");
    if (e0.size() != A.rows()) throw ValidationError("--e0: wrong dimension");
    t_max = estimate_convergence_time(cert, e0);
  }
  if (opts.json) {
    nlohmann::json j{{"P", matrix_json(cert.P)},
                     {"Q", matrix_json(cert.Q)},
                     {"L", matrix_json(cert.gain())},
                     {"frobenius_P", cert.frobenius_P()},
                     {"gamma", cert.gamma},
                     {"min_gamma", cert.min_gamma()},
                     {"eta_bound", cert.eta_bound},
                     {"lambda_min_P", cert.lambda_min_P},
                     {"beta", cert.beta}};
    j["convergence_time_bound"] = t_max ? nlohmann::json(*t_max) : nlohmann::json(nullptr);
    out << j.dump(2) << '\n';
  } else {
    out << std::setprecision(10);
    print_matrix(out, "P", cert.P);
    print_matrix(out, "L", cert.gain());
    out << "||P||_F = " << cert.frobenius_P() << '\n'
        << "gamma = " << cert.gamma << "  (needs > " << cert.min_gamma() << ")\n"
        << "beta = " << cert.beta << '\n';
    if (t_max) out << "T_max = " << *t_max << '\n';
  }
  if (!gain_file.empty()) {
    YAML::Node observer(YAML::NodeType::Map);
    observer["design"]["Q"] = matrix_to_yaml(cert.Q);
    observer["design"]["gamma"] = cert.gamma;
    observer["design"]["M"] = cert.eta_bound;
    YAML::Node root;
    root["observer"] = observer;
    YAML::Emitter em;
    em.SetDoublePrecision(17);
    em << root;
    std::ofstream f(gain_file);
    if (!f) throw ValidationError("cannot write " + gain_file);
    f << "# L = " << cert.gamma << " P^-1\n" << em.c_str() << '\n';
  }
  return kExitOk;
}

int cmd_batch(const CommonOptions& opts, const std::vector<std::string>& files, std::ostream& out,
              std::ostream& err) {
  const auto overrides = opts.overrides();
  std::vector<Scenario> scenarios;
  std::vector<std::string> labels;
  std::vector<int> codes(files.size(), kExitOk);
  std::vector<std::string> errors(files.size());
  std::vector<std::size_t> index_of(files.size(), files.size());
  std::set<std::string> used;
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::string label = std::filesystem::path(files[i]).stem().string();
    for (int k = 2; used.count(label); ++k) {
      label = std::filesystem::path(files[i]).stem().string() + "-" + std::to_string(k);
    }
    used.insert(label);
    labels.push_back(label);
    try {
      scenarios.push_back(scenario_from_file(files[i], overrides));
      index_of[i] = scenarios.size() - 1;
    } catch (...) {
      std::ostringstream msg;
      codes[i] = report_exception(std::current_exception(), msg);
      errors[i] = msg.str();
      err << files[i] << ": " << msg.str();
    }
  }
  auto outcomes = run_batch(scenarios, opts.worker_count());

  nlohmann::json summary = nlohmann::json::array();
  int code = kExitOk;
  for (std::size_t i = 0; i < files.size(); ++i) {
    nlohmann::json entry{{"file", files[i]}, {"out_dir", labels[i]}};
    if (index_of[i] < scenarios.size()) {
      const auto& outcome = outcomes[index_of[i]];
      if (outcome.error) {
        std::ostringstream msg;
        codes[i] = report_exception(outcome.error, msg);
        errors[i] = msg.str();
        err << files[i] << ": " << msg.str();
      } else {
        const Scenario& sc = scenarios[index_of[i]];
        RunReport r = make_report(sc, *outcome.trajectory);
        write_run_artifacts(std::filesystem::path(opts.out_dir) / labels[i], sc, *outcome.trajectory,
                            r);
        entry["verdict"] = std::string(to_string(r.verdict.label));
        entry["metric"] = r.verdict.metric_at_decision;
        if (!opts.json) out << verdict_line(r) << '\n';
      }
    }
    entry["exit_code"] = codes[i];
    if (!errors[i].empty()) entry["error"] = errors[i];
    if (code == kExitOk) code = codes[i];
    summary.push_back(entry);
  }
  std::filesystem::create_directories(opts.out_dir);
  std::ofstream(std::filesystem::path(opts.out_dir) / "batch.json") << summary.dump(2) << '\n';
  if (opts.json) out << summary.dump(2) << '\n';
  return code;
}

}  // namespace

int report_exception(std::exception_ptr error, std::ostream& err) {
  try {
    std::rethrow_exception(error);
  } catch (const DesignInfeasible& e) {
    err << "error: design infeasible: " << e.what();
    if (e.min_gamma()) err << " (minimum gamma " << *e.min_gamma() << ")";
    err << '\n';
    return kExitInfeasible;
  } catch (const NumericalAbort& e) {
    err << "error: numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fault vs. cyberattack diagnosis for linear plants", "cpsdiag"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions opts;
  app.add_option("--out-dir", opts.out_dir, "Directory for run artifacts")->capture_default_str();
  app.add_flag("--json", opts.json, "Print machine-readable JSON to stdout");
  app.add_option("--jobs", opts.jobs, "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  app.add_option("--set", opts.sets, "Override a scenario key, e.g. --set sim.dt=5e-5")
      ->allow_extra_args(false);

  std::string sim_file;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario file");
  simulate->add_option("scenario", sim_file, "Scenario YAML")->required();

  std::vector<std::string> cases;
  bool all_cases = false;
  auto* reproduce = app.add_subcommand("reproduce-paper", "Run the bundled reference cases");
  reproduce->add_option("cases", cases, "Cases to run (default: case1 case1-fast case2)");
  reproduce->add_flag("--all", all_cases, "Run every bundled case, including case1-long");

  std::string plant_file, a_text, b_text, e_text, eta_text;
  double delta_rel = kDefaultDeltaRel;
  std::optional<double> delta_abs;
  auto* classify_cmd = app.add_subcommand("classify", "Evaluate the metric for one eta");
  classify_cmd->add_option("--scenario", plant_file, "Read [plant] from this file");
  classify_cmd->add_option("--A", a_text, "State matrix literal, e.g. \"-30,0;0,-20\"");
  classify_cmd->add_option("--B", b_text, "Attack channel literal");
  classify_cmd->add_option("--E", e_text, "Fault channel literal");
  classify_cmd->add_option("--eta", eta_text, "Unknown input, e.g. \"1,2\"")->required();
  classify_cmd->add_option("--delta-rel", delta_rel, "Deadband relative to ||eta||")
      ->capture_default_str();
  classify_cmd->add_option("--delta", delta_abs, "Absolute deadband (overrides --delta-rel)");

  std::string design_file, design_a, q_text = "identity", gamma_text = "auto", e0_text;
  double design_M = 1.0;
  auto* design_cmd = app.add_subcommand("design", "Lyapunov gain design");
  design_cmd->add_option("--scenario", design_file, "Read A from this file's [plant]");
  design_cmd->add_option("--A", design_a, "State matrix literal");
  design_cmd->add_option("--Q", q_text, "identity, diag:a,b,... or rows a,b;c,d")
      ->capture_default_str();
  design_cmd->add_option("--M", design_M, "Bound on ||eta||")->capture_default_str();
  design_cmd->add_option("--gamma", gamma_text, "auto or a number")->capture_default_str();
  design_cmd->add_option("--e0", e0_text, "Initial error for the convergence-time bound");
  std::string gain_file;
  design_cmd->add_option("--gain-file", gain_file, "Write an [observer] design block to this file");

  std::vector<std::string> batch_files;
  auto* batch = app.add_subcommand("batch", "Run several scenario files in parallel");
  batch->add_option("scenarios", batch_files, "Scenario YAML files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return kExitValidation;
  }

  try {
    if (*simulate) return cmd_simulate(opts, sim_file, out);
    if (*reproduce) return cmd_reproduce(opts, cases, all_cases, out, err);
    if (*classify_cmd) {
      return cmd_classify(opts, plant_file, a_text, b_text, e_text, eta_text, delta_rel, delta_abs,
                          out);
    }
    if (*design_cmd) {
      return cmd_design(opts, design_file, design_a, q_text, design_M, gamma_text, e0_text,
                        gain_file, out);
    }
    if (*batch) return cmd_batch(opts, batch_files, out, err);
  } catch (...) {
    return report_exception(std::current_exception(), err);
  }
  return kExitValidation;
}

}  // namespace cpsdiag::cli
