#include "cli/commands.hpp"
#include "cli/report.hpp"
#include "cli/scenario_file.hpp"
#include "cpsdiag/reference_scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cpsdiag;
using namespace cpsdiag::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = CPSDIAG_SOURCE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_tool(std::vector<std::string> args) {
  args.insert(args.begin(), "cpsdiag");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cpsdiag_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kPlant = R"(plant:
  A: [[-30, 0], [0, -20]]
  B: [[3], [2]]
  E: [[2], [5]]
)";

const char* kRest = R"(anomaly:
  kind: fault
  signal: {kind: exponential-saturation, amplitude: 5, rate: 10}
observer:
  L: [[50, 0], [0, 50]]
  eps: 5.0e-3
sim:
  x0: [0.5, -0.5]
  T: 0.2
)";

void compare_json(const nlohmann::json& got, const nlohmann::json& want, const std::string& path) {
  INFO("at " << path);
  if (want.is_number() && got.is_number()) {
    const double a = got.get<double>(), b = want.get<double>();
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
    return;
  }
  REQUIRE(got.type() == want.type());
  if (want.is_object()) {
    CHECK(got.size() == want.size());
    for (auto it = want.begin(); it != want.end(); ++it) {
      REQUIRE(got.contains(it.key()));
      compare_json(got.at(it.key()), it.value(), path + "." + it.key());
    }
  } else if (want.is_array()) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      compare_json(got[i], want[i], path + "[" + std::to_string(i) + "]");
    }
  } else {
    CHECK(got == want);
  }
}

}  // namespace

TEST_CASE("scenario file parse errors name the field") {
  SUBCASE("short matrix row") {
    const std::string doc = "plant:\n  A: [[-30], [0, -20]]\n  B: [[3], [2]]\n  E: [[2], [5]]\n";
    try {
      build_plant(parse_document(doc));
      FAIL("accepted");
    } catch (const ParseError& e) {
      CHECK(e.field().find("[plant].A row 1") == 0);
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("non-numeric entry") {
    const std::string doc = "plant:\n  A: [[-30, x], [0, -20]]\n  B: [[3], [2]]\n  E: [[2], [5]]\n";
    CHECK_THROWS_WITH_AS(build_plant(parse_document(doc)),
                         doctest::Contains("[plant].A row 1 col 2"), ParseError);
  }
  SUBCASE("unknown keys") {
    CHECK_THROWS_WITH_AS(build_scenario(parse_document(std::string(kPlant) + kRest + "extra: 1\n")),
                         doctest::Contains("extra"), ParseError);
    std::string doc = std::string(kPlant) + kRest;
    doc.replace(doc.find("  T: 0.2"), 8, "  T: 0.2\n  horizon: 3");
    CHECK_THROWS_WITH_AS(build_scenario(parse_document(doc)), doctest::Contains("[sim].horizon"),
                         ParseError);
  }
  SUBCASE("signal problems") {
    std::string doc = std::string(kPlant) + kRest;
    doc.replace(doc.find("exponential-saturation"), 22, "triangle-wave");
    CHECK_THROWS_WITH_AS(build_scenario(parse_document(doc)),
                         doctest::Contains("[anomaly].signal.kind"), ParseError);
    doc = std::string(kPlant) + kRest;
    doc.replace(doc.find("amplitude: 5"), 12, "amplitude: [5, 1]");
    CHECK_THROWS_AS(build_scenario(parse_document(doc)), ParseError);
  }
  SUBCASE("observer needs exactly one gain source") {
    std::string doc = std::string(kPlant) + kRest;
    doc.replace(doc.find("  L: [[50, 0], [0, 50]]"), 23, "  design: {gamma: auto}\n  L: [[1, 0], [0, 1]]");
    CHECK_THROWS_WITH_AS(build_scenario(parse_document(doc)), doctest::Contains("exactly one"),
                         ParseError);
  }
  SUBCASE("malformed YAML") {
    CHECK_THROWS_AS(parse_document("plant: [1, 2"), ParseError);
  }
}

TEST_CASE("design block builds a certified observer") {
  std::string doc = std::string(kPlant) + kRest;
  doc.replace(doc.find("  L: [[50, 0], [0, 50]]"), 23, "  design: {Q: identity, gamma: auto, M: 60}");
  const Scenario sc = build_scenario(parse_document(doc));
  REQUIRE(sc.observer().certificate().has_value());
  CHECK(sc.observer().certificate()->gamma == doctest::Approx(2.7041634566));
  CHECK(sc.observer().L()(0, 0) == doctest::Approx(2.7041634566 * 60.0));

  doc.replace(doc.find("gamma: auto"), 11, "gamma: 1.0");
  CHECK_THROWS_AS(build_scenario(parse_document(doc)), DesignInfeasible);
}

TEST_CASE("overrides and echo round trip") {
  YAML::Node root = parse_document(std::string(kPlant) + kRest);
  apply_overrides(root, {Override::parse("sim.T=0.05"), Override::parse("sim.x_hat0=[0.1, 0.2]"),
                         Override::parse("observer.tau=0.05")});
  const Scenario sc = build_scenario(root);
  CHECK(sc.settings().horizon == 0.05);
  CHECK(sc.x_hat0()(1) == 0.2);
  CHECK(sc.observer().tau() == 0.05);
  CHECK_THROWS_AS(Override::parse("novalue"), ParseError);

  const Scenario echoed = build_scenario(parse_document(YAML::Dump(scenario_to_yaml(sc))));
  const Trajectory a = run_scenario(sc), b = run_scenario(echoed);
  REQUIRE(a.size() == b.size());
  CHECK(a.x_hat.back() == b.x_hat.back());
  CHECK(a.eta_hat.back() == b.eta_hat.back());
  CHECK(echoed.anomaly().eta_bound() == sc.anomaly().eta_bound());

  const Scenario ref = reference::make("case2");
  const Scenario ref_echo = build_scenario(parse_document(YAML::Dump(scenario_to_yaml(ref))));
  CHECK(run_scenario(ref).eta_hat.back() == run_scenario(ref_echo).eta_hat.back());
}

TEST_CASE("matrix literals") {
  CHECK(parse_matrix_literal("identity", 3, "Q") == Matrix::Identity(3, 3));
  const Matrix d = parse_matrix_literal("diag: 2, 3", 2, "Q");
  CHECK(d(0, 0) == 2.0);
  CHECK(d(1, 1) == 3.0);
  const Matrix m = parse_matrix_literal("1,2;3,4", -1, "A");
  CHECK(m(1, 0) == 3.0);
  CHECK_THROWS_AS(parse_matrix_literal("1,2;3", -1, "A"), ParseError);
  CHECK_THROWS_AS(parse_matrix_literal("1,a", -1, "A"), ParseError);
  CHECK_THROWS_AS(parse_matrix_literal("diag:1", 2, "Q"), ParseError);
}

TEST_CASE("summary round-trips through JSON") {
  const Scenario sc = reference::make("case2", 1e-4, 0.2);
  const Trajectory tr = run_scenario(sc);
  RunReport r = make_report(sc, tr);
  r.artifacts["trajectory"] = "trajectory.csv";
  const RunReport back = report_from_json(nlohmann::json::parse(to_json(r).dump(2)));
  CHECK(back.verdict.label == r.verdict.label);
  CHECK(back.verdict.metric_at_decision == r.verdict.metric_at_decision);
  CHECK(back.verdict.delta == r.verdict.delta);
  CHECK(back.sliding_time == r.sliding_time);
  CHECK(back.trailing_eta_hat_norm == r.trailing_eta_hat_norm);
  CHECK(back.eta_bound == r.eta_bound);
  CHECK(back.eta_hat == r.eta_hat);
  CHECK(back.artifacts == r.artifacts);
  CHECK(to_json(back) == to_json(r));
}

TEST_CASE("trajectory CSV has 4n+2 columns") {
  const fs::path dir = scratch("csv");
  const auto file = write_file(dir, "three.yaml", R"(plant:
  A: [[-3, 1, 0], [0, -2, 0], [0, 0, -4]]
  B: [[1], [0], [1]]
  E: [[0], [1], [0]]
anomaly: {kind: attack, signal: {kind: constant, value: 0.5}}
observer: {design: {gamma: auto}, eps: 1.0e-3}
sim: {T: 0.05, dt: 1.0e-4, x0: [1, 0, 0]}
)");
  const Run r = run_tool({"simulate", file.string(), "--out-dir", (dir / "out").string()});
  REQUIRE(r.code == 0);
  std::ifstream in(dir / "out" / "trajectory.csv");
  std::string header, row;
  std::getline(in, header);
  CHECK(header == trajectory_header(3));
  CHECK(header == "t,x1,x2,x3,xhat1,xhat2,xhat3,eta1,eta2,eta3,etahat1,etahat2,etahat3,residual");
  std::size_t rows = 0;
  while (std::getline(in, row)) {
    REQUIRE(std::count(row.begin(), row.end(), ',') == 4 * 3 + 1);
    ++rows;
  }
  CHECK(rows == 501);
  CHECK(slurp(dir / "out" / "metric.csv").rfind("t,M,dist_B,dist_E\n", 0) == 0);
}

TEST_CASE("simulate command") {
  const fs::path dir = scratch("simulate");
  const Run r = run_tool({"simulate", (kSource / "scenarios" / "case2.yaml").string(), "--out-dir",
                     dir.string(), "--set", "sim.T=0.5", "--json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("verdict") == "cyberattack");
  CHECK(j.at("config").at("sim").at("T") == 0.5);
  const auto on_disk = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(on_disk == j);
  for (const auto& [role, name] : j.at("artifacts").items()) {
    CHECK(fs::exists(dir / name.get<std::string>()));
  }
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  SUBCASE("parse error") {
    const auto bad = write_file(dir, "bad.yaml",
                                "plant:\n  A: [[-30, 0, 1], [0, -20]]\n  B: [[3], [2]]\n  E: [[2], [5]]\n"
                                "observer: {L: [[1, 0], [0, 1]]}\n");
    const Run r = run_tool({"simulate", bad.string(), "--out-dir", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("[plant].A row 1 (line 2)") != std::string::npos);
    CHECK(run_tool({"simulate", (dir / "missing.yaml").string()}).code == 2);
    CHECK(run_tool({"simulate"}).code == 2);
    CHECK(run_tool({"frobnicate"}).code == 2);
  }
  SUBCASE("numerical abort") {
    const auto stiff = write_file(dir, "stiff.yaml", R"(plant: {A: [[-100000]], B: [[1]], E: [[1]]}
observer: {L: [[1]], eps: 1.0e-4}
sim: {x0: [1], T: 1, dt: 0.01}
)");
    const Run r = run_tool({"simulate", stiff.string(), "--out-dir", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("t = ") != std::string::npos);
  }
  SUBCASE("design infeasible") {
    const auto unstable = write_file(dir, "unstable.yaml", R"(plant: {A: [[1, 0], [0, -1]], B: [[1], [0]], E: [[0], [1]]}
observer: {design: {gamma: auto}}
)");
    CHECK(run_tool({"simulate", unstable.string(), "--out-dir", dir.string()}).code == 4);
  }
  SUBCASE("unknown reference case") {
    const Run r = run_tool({"reproduce-paper", "case9", "--out-dir", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("case1-fast") != std::string::npos);
  }
  SUBCASE("help") { CHECK(run_tool({"--help"}).code == 0); }
}

TEST_CASE("classify command") {
  const std::vector<std::string> plant = {"--A", "-30,0;0,-20", "--B", "3;2", "--E", "2;5"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = {"classify"};
    args.insert(args.end(), plant.begin(), plant.end());
    args.insert(args.end(), extra.begin(), extra.end());
    return run_tool(args);
  };
  Run r = with({"--eta", "3,2", "--json"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("metric").get<double>() == doctest::Approx(-2.0427).epsilon(1e-4));
  CHECK(j.at("verdict") == "cyberattack");
  r = with({"--eta", "2,5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("verdict: fault") != std::string::npos);
  r = with({"--eta", "0,0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("metric undefined for eta == 0") != std::string::npos);
  CHECK(with({"--eta", "1,2,3"}).code == 2);
  const Run from_file = run_tool({"classify", "--scenario",
                             (kSource / "scenarios" / "case2.yaml").string(), "--eta", "2,5"});
  CHECK(from_file.code == 0);
}

TEST_CASE("design command") {
  const fs::path dir = scratch("design");
  Run r = run_tool({"design", "--A", "-30,0;0,-20", "--M", "60", "--json", "--gain-file",
               (dir / "gain.yaml").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("min_gamma").get<double>() == doctest::Approx(1.8027756).epsilon(1e-6));
  CHECK(j.at("gamma").get<double>() == doctest::Approx(2.7041634566).epsilon(1e-9));
  CHECK(j.at("P")[0][0].get<double>() == doctest::Approx(1.0 / 60.0));
  CHECK(j.at("L")[1][1].get<double>() == doctest::Approx(2.7041634566 * 40.0));

  // The gain file drops into a scenario's observer section.
  const std::string body = slurp(dir / "gain.yaml");
  const Scenario sc = build_scenario(parse_document(std::string(kPlant) + body +
                                                    "sim: {T: 0.01}\n"));
  REQUIRE(sc.observer().certificate().has_value());
  CHECK(sc.observer().certificate()->gamma == doctest::Approx(2.7041634566));

  r = run_tool({"design", "--A", "1,0;0,1"});
  CHECK(r.code == 4);
  CHECK(r.err.find("Lyapunov certificate does not exist") != std::string::npos);
  r = run_tool({"design", "--A", "-30,0;0,-20", "--M", "60", "--gamma", "1.5"});
  CHECK(r.code == 4);
  CHECK(r.err.find("1.80277") != std::string::npos);
  CHECK(run_tool({"design", "--A", "-1,0;0,-1", "--Q", "diag:1,-1"}).code == 2);
}

TEST_CASE("batch command") {
  const fs::path dir = scratch("batch");
  const auto good = write_file(dir, "good.yaml", std::string(kPlant) + kRest);
  const auto bad = write_file(dir, "bad.yaml", std::string(kPlant) + "observer: {}\n");
  const Run r = run_tool({"batch", good.string(), bad.string(), (kSource / "scenarios" / "case2.yaml").string(),
                     "--jobs", "2", "--out-dir", (dir / "out").string(), "--set", "sim.T=0.2"});
  CHECK(r.code == 2);
  CHECK(r.out.find("good: fault") != std::string::npos);
  CHECK(r.out.find("case2: cyberattack") != std::string::npos);
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "batch.json"));
  REQUIRE(summary.size() == 3);
  CHECK(summary[0].at("exit_code") == 0);
  CHECK(summary[1].at("exit_code") == 2);
  CHECK(fs::exists(dir / "out" / "case2" / "summary.json"));
}

TEST_CASE("reproduce-paper matches the golden summaries") {
  const fs::path dir = scratch("golden");
  const Run r = run_tool({"reproduce-paper", "case1", "case2", "--out-dir", dir.string(), "--jobs", "2"});
  REQUIRE(r.code == 0);
  for (const char* c : {"case1", "case2"}) {
    const auto got = nlohmann::json::parse(slurp(dir / c / "summary.json"));
    const auto want =
        nlohmann::json::parse(slurp(kSource / "tests" / "golden" / (std::string(c) + "_summary.json")));
    compare_json(got, want, c);
    for (const char* fig : {"fig_states.csv", "fig_eta.csv", "fig_metric.csv"}) {
      CHECK(fs::exists(dir / c / fig));
    }
  }
}
