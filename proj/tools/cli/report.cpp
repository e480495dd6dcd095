#include "cli/report.hpp"

#include "cli/scenario_file.hpp"
#include "cpsdiag/version.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cpsdiag::cli {
namespace {

void put(std::ostream& out, double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.write(buf.data(), res.ptr - buf.data());
}

void put_vector(std::ostream& out, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    out << ',';
    put(out, v(i));
  }
}

nlohmann::json vec_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector json_vec(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + p.string());
  return out;
}

VerdictLabel label_from(const std::string& s) { return parse_verdict_label(s); }

InconclusiveReason reason_from(const std::string& s) {
  for (auto r : {InconclusiveReason::None, InconclusiveReason::SlidingNotReached,
                 InconclusiveReason::EstimateBelowFloor}) {
    if (to_string(r) == s) return r;
  }
  throw ValidationError("unknown inconclusive reason '" + s + "'");
}

}  // namespace

RunReport make_report(const Scenario& scenario, const Trajectory& tr) {
  RunReport r;
  r.scenario = scenario.name();
  r.version = kVersion;
  r.verdict = tr.verdict;
  r.delta_rel = scenario.settings().delta_rel;
  r.trailing_eta_hat_norm = tr.trailing_eta_hat_norm;
  r.trailing_samples = tr.trailing_samples;
  r.sliding_time = tr.sliding_time;
  r.eta_bound = scenario.anomaly().eta_bound();
  r.certified = scenario.observer().certificate().has_value();
  r.warnings = scenario.observer().warnings();
  r.steps = scenario.steps();
  r.dt = scenario.settings().dt;
  if (tr.size() > 0) {
    r.final_time = tr.times.back();
    r.x = tr.x.back();
    r.x_hat = tr.x_hat.back();
    r.eta = tr.eta_true.back();
    r.eta_hat = tr.eta_hat.back();
    r.residual = tr.residual.back();
  }
  r.config = yaml_to_json(scenario_to_yaml(scenario));
  return r;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["tool"] = "cpsdiag";
  j["version"] = r.version;
  j["scenario"] = r.scenario;
  j["verdict"] = std::string(to_string(r.verdict.label));
  j["reason"] = std::string(to_string(r.verdict.reason));
  j["metric"] = r.verdict.metric_at_decision;
  j["delta"] = r.verdict.delta;
  j["delta_rel"] = r.delta_rel;
  j["decision_time"] = r.verdict.decision_time;
  j["trailing_eta_hat_norm"] = r.trailing_eta_hat_norm;
  j["trailing_samples"] = r.trailing_samples;
  j["sliding_reached"] = r.sliding_time.has_value();
  j["sliding_time"] = r.sliding_time ? nlohmann::json(*r.sliding_time) : nlohmann::json(nullptr);
  j["eta_bound"] = r.eta_bound;
  j["certified"] = r.certified;
  j["warnings"] = r.warnings;
  j["steps"] = r.steps;
  j["dt"] = r.dt;
  j["final"] = {{"t", r.final_time},          {"x", vec_json(r.x)},
                {"x_hat", vec_json(r.x_hat)}, {"eta", vec_json(r.eta)},
                {"eta_hat", vec_json(r.eta_hat)}, {"residual", r.residual}};
  j["artifacts"] = r.artifacts;
  j["config"] = r.config;
  return j;
}

RunReport report_from_json(const nlohmann::json& j) {
  try {
    RunReport r;
    r.version = j.at("version").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    r.verdict.label = label_from(j.at("verdict").get<std::string>());
    r.verdict.reason = reason_from(j.at("reason").get<std::string>());
    r.verdict.metric_at_decision = j.at("metric").get<double>();
    r.verdict.delta = j.at("delta").get<double>();
    r.verdict.decision_time = j.at("decision_time").get<double>();
    r.delta_rel = j.at("delta_rel").get<double>();
    r.trailing_eta_hat_norm = j.at("trailing_eta_hat_norm").get<double>();
    r.trailing_samples = j.at("trailing_samples").get<std::size_t>();
    if (!j.at("sliding_time").is_null()) r.sliding_time = j.at("sliding_time").get<double>();
    r.eta_bound = j.at("eta_bound").get<double>();
    r.certified = j.at("certified").get<bool>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.steps = j.at("steps").get<std::size_t>();
    r.dt = j.at("dt").get<double>();
    const auto& f = j.at("final");
    r.final_time = f.at("t").get<double>();
    r.x = json_vec(f.at("x"));
    r.x_hat = json_vec(f.at("x_hat"));
    r.eta = json_vec(f.at("eta"));
    r.eta_hat = json_vec(f.at("eta_hat"));
    r.residual = f.at("residual").get<double>();
    r.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    r.config = j.at("config");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed summary: ") + e.what());
  }
}

nlohmann::json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json j = nlohmann::json::object();
      for (const auto& kv : node) j[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& item : node) j.push_back(yaml_to_json(item));
      return j;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = node.Scalar();
      long long i = 0;
      auto [ip, iec] = std::from_chars(s.data(), s.data() + s.size(), i);
      if (iec == std::errc() && ip == s.data() + s.size()) return i;
      double d = 0.0;
      if (YAML::convert<double>::decode(node, d)) return d;
      if (s == "true") return true;
      if (s == "false") return false;
      return s;
    }
    default:
      return nullptr;
  }
}

std::string trajectory_header(Index n) {
  std::string h = "t";
  for (const char* prefix : {"x", "xhat", "eta", "etahat"}) {
    for (Index i = 1; i <= n; ++i) h += "," + std::string(prefix) + std::to_string(i);
  }
  return h + ",residual";
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  const Index n = tr.size() > 0 ? tr.x.front().size() : 0;
  out << trajectory_header(n) << '\n';
  for (std::size_t k = 0; k < tr.size(); ++k) {
    put(out, tr.times[k]);
    put_vector(out, tr.x[k]);
    put_vector(out, tr.x_hat[k]);
    put_vector(out, tr.eta_true[k]);
    put_vector(out, tr.eta_hat[k]);
    out << ',';
    put(out, tr.residual[k]);
    out << '\n';
  }
}

void write_metric_csv(std::ostream& out, const Trajectory& tr) {
  out << "t,M,dist_B,dist_E\n";
  for (const auto& m : tr.metric) {
    if (!m) continue;
    put(out, m->t);
    for (double v : {m->value, m->dist_to_B, m->dist_to_E}) {
      out << ',';
      put(out, v);
    }
    out << '\n';
  }
}

void write_run_artifacts(const std::filesystem::path& dir, const Scenario& scenario,
                         const Trajectory& tr, RunReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create " + dir.string() + ": " + ec.message());
  {
    auto out = open_out(dir / "trajectory.csv");
    write_trajectory_csv(out, tr);
  }
  {
    auto out = open_out(dir / "metric.csv");
    write_metric_csv(out, tr);
  }
  {
    auto out = open_out(dir / "scenario.yaml");
    YAML::Emitter em;
    em.SetDoublePrecision(17);
    em << scenario_to_yaml(scenario);
    out << em.c_str() << '\n';
  }
  report.artifacts["trajectory"] = "trajectory.csv";
  report.artifacts["metric"] = "metric.csv";
  report.artifacts["scenario"] = "scenario.yaml";
  report.artifacts["summary"] = "summary.json";
  auto out = open_out(dir / "summary.json");
  out << to_json(report).dump(2) << '\n';
}

void write_figure_csvs(const std::filesystem::path& dir, const Trajectory& tr, RunReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create " + dir.string() + ": " + ec.message());
  const Index n = tr.size() > 0 ? tr.x.front().size() : 0;
  auto header = [&](std::ostream& out, std::initializer_list<const char*> prefixes) {
    out << 't';
    for (const char* p : prefixes) {
      for (Index i = 1; i <= n; ++i) out << ',' << p << i;
    }
    out << '\n';
  };
  {
    auto out = open_out(dir / "fig_states.csv");
    header(out, {"x", "xhat"});
    for (std::size_t k = 0; k < tr.size(); ++k) {
      put(out, tr.times[k]);
      put_vector(out, tr.x[k]);
      put_vector(out, tr.x_hat[k]);
      out << '\n';
    }
  }
  {
    auto out = open_out(dir / "fig_eta.csv");
    header(out, {"eta", "etahat"});
    for (std::size_t k = 0; k < tr.size(); ++k) {
      put(out, tr.times[k]);
      put_vector(out, tr.eta_true[k]);
      put_vector(out, tr.eta_hat[k]);
      out << '\n';
    }
  }
  {
    auto out = open_out(dir / "fig_metric.csv");
    out << "t,M\n";
    for (const auto& m : tr.metric) {
      if (!m) continue;
      put(out, m->t);
      out << ',';
      put(out, m->value);
      out << '\n';
    }
  }
  report.artifacts["fig_states"] = "fig_states.csv";
  report.artifacts["fig_eta"] = "fig_eta.csv";
  report.artifacts["fig_metric"] = "fig_metric.csv";
}

std::string verdict_line(const RunReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << (r.scenario.empty() ? "scenario" : r.scenario) << ": " << to_string(r.verdict.label);
  if (r.verdict.reason != InconclusiveReason::None) os << " (" << to_string(r.verdict.reason) << ")";
  os << "  M=" << r.verdict.metric_at_decision << "  delta=" << r.verdict.delta;
  if (r.sliding_time) os << "  sliding at t=" << *r.sliding_time;
  else os << "  sliding not reached";
  return os.str();
}

}  // namespace cpsdiag::cli
