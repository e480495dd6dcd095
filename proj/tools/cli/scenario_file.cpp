#include "cli/scenario_file.hpp"

#include "cpsdiag/design.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace cpsdiag::cli {
namespace {

int line_of(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  return mark.is_null() ? -1 : mark.line + 1;
}

[[noreturn]] void fail(const std::string& field, const std::string& message,
                       const YAML::Node& node = YAML::Node()) {
  throw ParseError(field, message, node.IsDefined() ? line_of(node) : -1);
}

std::string child_path(const std::string& parent, const std::string& key) {
  return parent + "." + key;
}

void check_keys(const YAML::Node& map, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  if (!map.IsMap()) fail(path, "expected a mapping", map);
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string list;
      for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      fail(child_path(path, key), "unknown key (allowed: " + list + ")", kv.first);
    }
  }
}

double as_double(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected a number", node);
  double v = 0.0;
  try {
    v = node.as<double>();
  } catch (const YAML::Exception&) {
    fail(path, "expected a number, got '" + node.Scalar() + "'", node);
  }
  if (!std::isfinite(v)) fail(path, "must be finite", node);
  return v;
}

std::size_t as_count(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected a non-negative integer", node);
  try {
    const auto v = node.as<long long>();
    if (v < 0) fail(path, "expected a non-negative integer", node);
    return static_cast<std::size_t>(v);
  } catch (const YAML::Exception&) {
    fail(path, "expected a non-negative integer, got '" + node.Scalar() + "'", node);
  }
}

std::string as_string(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected a string", node);
  return node.Scalar();
}

Vector as_vector(const YAML::Node& node, const std::string& path, Index expected = -1) {
  Vector v;
  if (node.IsScalar()) {
    v = Vector::Constant(1, as_double(node, path));
  } else if (node.IsSequence()) {
    v.resize(static_cast<Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) {
      v(static_cast<Index>(i)) = as_double(node[i], path + "[" + std::to_string(i) + "]");
    }
  } else {
    fail(path, "expected a number or a list of numbers", node);
  }
  if (v.size() == 0) fail(path, "must not be empty", node);
  if (expected >= 0 && v.size() != expected) {
    fail(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()),
         node);
  }
  return v;
}

Matrix as_matrix(const YAML::Node& node, const std::string& path, Index rows = -1,
                 Index cols = -1) {
  if (!node.IsSequence() || node.size() == 0) {
    fail(path, "expected a non-empty list of rows", node);
  }
  const auto n_rows = static_cast<Index>(node.size());
  if (rows >= 0 && n_rows != rows) {
    fail(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(n_rows), node);
  }
  Matrix m;
  for (Index r = 0; r < n_rows; ++r) {
    const YAML::Node row = node[static_cast<std::size_t>(r)];
    const std::string row_path = path + " row " + std::to_string(r + 1);
    if (!row.IsSequence()) fail(row_path, "expected a list of numbers", row);
    const auto n_cols = static_cast<Index>(row.size());
    const Index want = r == 0 ? cols : m.cols();
    if (want >= 0 && n_cols != want) {
      fail(row_path,
           "expected " + std::to_string(want) + " entries, got " + std::to_string(n_cols), row);
    }
    if (n_cols == 0) fail(row_path, "must not be empty", row);
    if (r == 0) m.resize(n_rows, n_cols);
    for (Index c = 0; c < n_cols; ++c) {
      m(r, c) = as_double(row[static_cast<std::size_t>(c)],
                          row_path + " col " + std::to_string(c + 1));
    }
  }
  return m;
}

struct SignalContext {
  const PlantModel* plant = nullptr;
  const Signal* input = nullptr;
  bool allow_attack_policy = false;
};

template <class F>
auto rethrow_at(const std::string& path, const YAML::Node& node, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    fail(path, e.what(), node);
  }
}

Signal parse_signal(const YAML::Node& node, const std::string& path, Index dimension,
                    const SignalContext& ctx) {
  if (!node.IsMap()) fail(path, "expected a signal mapping with a 'kind' key", node);
  const YAML::Node kind_node = node["kind"];
  if (!kind_node) fail(child_path(path, "kind"), "missing", node);
  const std::string kind = as_string(kind_node, child_path(path, "kind"));
  auto field = [&](const char* key) -> YAML::Node {
    const YAML::Node v = node[key];
    if (!v) fail(child_path(path, key), "missing", node);
    return v;
  };
  auto vec = [&](const char* key) { return as_vector(field(key), child_path(path, key), dimension); };
  auto num = [&](const char* key) { return as_double(field(key), child_path(path, key)); };
  auto num_or = [&](const char* key, double fallback) {
    const YAML::Node v = node[key];
    return v ? as_double(v, child_path(path, key)) : fallback;
  };

  Signal s = rethrow_at(path, node, [&]() -> Signal {
    if (kind == "constant") {
      check_keys(node, path, {"kind", "value"});
      return Signal::constant(vec("value"));
    }
    if (kind == "step") {
      check_keys(node, path, {"kind", "time", "before", "after"});
      return Signal::step(num("time"), vec("before"), vec("after"));
    }
    if (kind == "ramp") {
      check_keys(node, path, {"kind", "start", "slope", "offset"});
      Vector slope = vec("slope");
      Vector offset = node["offset"] ? vec("offset") : Vector::Zero(slope.size());
      return Signal::ramp(num_or("start", 0.0), std::move(slope), std::move(offset));
    }
    if (kind == "exponential-saturation") {
      check_keys(node, path, {"kind", "amplitude", "rate"});
      return Signal::exp_saturation(vec("amplitude"), num("rate"));
    }
    if (kind == "sinusoid") {
      check_keys(node, path, {"kind", "amplitude", "omega", "phase"});
      return Signal::sinusoid(vec("amplitude"), num("omega"), num_or("phase", 0.0));
    }
    if (kind == "piecewise-samples") {
      check_keys(node, path, {"kind", "times", "values"});
      const Vector times = as_vector(field("times"), child_path(path, "times"));
      const YAML::Node values = field("values");
      const std::string vpath = child_path(path, "values");
      if (!values.IsSequence() || values.size() != static_cast<std::size_t>(times.size())) {
        fail(vpath, "expected one value per sample time", values);
      }
      std::vector<Vector> vs;
      for (std::size_t i = 0; i < values.size(); ++i) {
        vs.push_back(as_vector(values[i], vpath + "[" + std::to_string(i) + "]", dimension));
      }
      return Signal::piecewise(std::vector<double>(times.data(), times.data() + times.size()),
                               std::move(vs));
    }
    if (kind == "composite-sum") {
      check_keys(node, path, {"kind", "terms", "weights"});
      const YAML::Node terms = field("terms");
      const std::string tpath = child_path(path, "terms");
      if (!terms.IsSequence() || terms.size() == 0) fail(tpath, "expected a list of signals", terms);
      std::vector<Signal> parts;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        parts.push_back(parse_signal(terms[i], tpath + "[" + std::to_string(i) + "]", dimension, ctx));
      }
      std::vector<double> weights;
      if (node["weights"]) {
        const Vector w = as_vector(node["weights"], child_path(path, "weights"),
                                   static_cast<Index>(parts.size()));
        weights.assign(w.data(), w.data() + w.size());
      }
      return Signal::sum(std::move(parts), std::move(weights));
    }
    if (kind == "steady-state-attack") {
      check_keys(node, path, {"kind", "target"});
      if (!ctx.allow_attack_policy || !ctx.plant || !ctx.input) {
        fail(child_path(path, "kind"), "steady-state-attack is only valid as an attack signal", kind_node);
      }
      return steadystate_attack_signal(
          *ctx.plant, as_vector(field("target"), child_path(path, "target"), ctx.plant->states()),
          *ctx.input);
    }
    fail(child_path(path, "kind"),
         "unknown signal kind '" + kind +
             "' (expected constant, step, ramp, exponential-saturation, sinusoid, "
             "piecewise-samples, composite-sum, steady-state-attack)",
         kind_node);
  });
  if (dimension >= 0 && s.dimension() != dimension) {
    fail(path,
         "signal dimension " + std::to_string(s.dimension()) + ", expected " +
             std::to_string(dimension),
         node);
  }
  return s;
}

YAML::Node section(const YAML::Node& root, const char* name, bool required) {
  const YAML::Node s = root[name];
  if (!s && required) fail(std::string("[") + name + "]", "missing section", root);
  return s;
}

YAML::Node flow(YAML::Node n) {
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

YAML::Node vector_to_yaml(const Vector& v) {
  YAML::Node seq(YAML::NodeType::Sequence);
  for (Index i = 0; i < v.size(); ++i) seq.push_back(v(i));
  return flow(seq);
}

}  // namespace

ParseError::ParseError(std::string field, const std::string& message, int line)
    : ValidationError(field + (line > 0 ? " (line " + std::to_string(line) + ")" : "") + ": " +
                      message),
      field_(std::move(field)),
      line_(line) {}

Override Override::parse(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ParseError("--set " + text, "expected key=value with a dotted key such as sim.dt=5e-5");
  }
  Override o;
  o.value = text.substr(eq + 1);
  std::stringstream keys(text.substr(0, eq));
  std::string seg;
  while (std::getline(keys, seg, '.')) {
    if (seg.empty()) throw ParseError("--set " + text, "empty path segment");
    o.path.push_back(seg);
  }
  return o;
}

YAML::Node parse_document(const std::string& text) {
  try {
    YAML::Node root = YAML::Load(text);
    if (!root.IsMap()) throw ParseError("<document>", "expected a mapping of sections");
    return root;
  } catch (const YAML::ParserException& e) {
    throw ParseError("<document>", e.msg, e.mark.is_null() ? -1 : e.mark.line + 1);
  }
}

YAML::Node load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

namespace {

void set_path(YAML::Node node, const std::vector<std::string>& path, std::size_t i,
              const YAML::Node& value) {
  if (i + 1 == path.size()) {
    node[path[i]] = value;
    return;
  }
  YAML::Node child = node[path[i]];
  if (child.IsDefined() && !child.IsMap()) {
    throw ParseError("--set " + path[i], "cannot descend into a non-mapping value");
  }
  set_path(child, path, i + 1, value);
}

}  // namespace

void apply_overrides(YAML::Node& root, const std::vector<Override>& overrides) {
  for (const auto& o : overrides) {
    YAML::Node value;
    try {
      value = YAML::Load(o.value);
    } catch (const YAML::Exception& e) {
      throw ParseError("--set " + o.value, e.what());
    }
    set_path(root, o.path, 0, value);
  }
}

PlantModel build_plant(const YAML::Node& root) {
  check_keys(root, "<document>", {"name", "plant", "anomaly", "input", "observer", "sim"});
  const YAML::Node p = section(root, "plant", true);
  check_keys(p, "[plant]", {"A", "B", "E"});
  auto need = [&](const char* key) {
    const YAML::Node v = p[key];
    if (!v) fail(std::string("[plant].") + key, "missing", p);
    return v;
  };
  const YAML::Node a_node = need("A");
  const Index n = a_node.IsSequence() ? static_cast<Index>(a_node.size()) : -1;
  Matrix A = as_matrix(a_node, "[plant].A", n, n);
  Matrix B = as_matrix(need("B"), "[plant].B", n);
  Matrix E = as_matrix(need("E"), "[plant].E", n);
  return rethrow_at("[plant]", p, [&] { return PlantModel(A, B, E); });
}

Scenario build_scenario(const YAML::Node& root) {
  PlantModel plant = build_plant(root);
  const Index n = plant.states();
  std::string name;
  if (root["name"]) name = as_string(root["name"], "[name]");

  SimulationSettings settings;
  Vector x0 = Vector::Zero(n);
  Vector x_hat0 = Vector::Zero(n);
  if (const YAML::Node s = section(root, "sim", false)) {
    check_keys(s, "[sim]",
               {"x0", "x_hat0", "T", "dt", "delta_rel", "metric_floor", "trailing_fraction",
                "dwell_steps", "record_every", "seed"});
    if (s["x0"]) x0 = as_vector(s["x0"], "[sim].x0", n);
    if (s["x_hat0"]) x_hat0 = as_vector(s["x_hat0"], "[sim].x_hat0", n);
    if (s["T"]) settings.horizon = as_double(s["T"], "[sim].T");
    if (s["dt"]) settings.dt = as_double(s["dt"], "[sim].dt");
    if (s["delta_rel"]) settings.delta_rel = as_double(s["delta_rel"], "[sim].delta_rel");
    if (s["metric_floor"]) settings.metric_floor = as_double(s["metric_floor"], "[sim].metric_floor");
    if (s["trailing_fraction"]) {
      settings.trailing_fraction = as_double(s["trailing_fraction"], "[sim].trailing_fraction");
    }
    if (s["dwell_steps"]) settings.dwell_steps = as_count(s["dwell_steps"], "[sim].dwell_steps");
    if (s["record_every"]) settings.record_every = as_count(s["record_every"], "[sim].record_every");
    if (s["seed"]) settings.seed = as_count(s["seed"], "[sim].seed");
  }
  if (!(settings.dt > 0.0)) fail("[sim].dt", "must be positive");

  Signal input = Signal::zero(plant.inputs());
  if (const YAML::Node in = section(root, "input", false)) {
    input = parse_signal(in, "[input]", plant.inputs(), {});
  }

  AnomalySignal anomaly = AnomalySignal::none();
  if (const YAML::Node a = section(root, "anomaly", false)) {
    check_keys(a, "[anomaly]", {"kind", "signal", "M"});
    if (!a["kind"]) fail("[anomaly].kind", "missing", a);
    const std::string kind = as_string(a["kind"], "[anomaly].kind");
    std::optional<double> M;
    if (a["M"]) {
      M = as_double(a["M"], "[anomaly].M");
      if (!(*M > 0.0)) fail("[anomaly].M", "must be positive", a["M"]);
    }
    if (kind == "none") {
      if (a["signal"]) fail("[anomaly].signal", "not allowed when kind is none", a["signal"]);
      anomaly = AnomalySignal::none(M.value_or(1.0));
    } else if (kind == "fault" || kind == "attack") {
      if (!a["signal"]) fail("[anomaly].signal", "missing", a);
      const bool is_fault = kind == "fault";
      SignalContext ctx{&plant, &input, !is_fault};
      Signal sig = parse_signal(a["signal"], "[anomaly].signal",
                                is_fault ? plant.fault_channels() : plant.inputs(), ctx);
      const AnomalyKind k = is_fault ? AnomalyKind::Fault : AnomalyKind::Attack;
      const double bound =
          M ? *M : prescan_eta_bound(plant, k, sig, settings.horizon, settings.dt);
      anomaly = is_fault ? AnomalySignal::fault(std::move(sig), bound)
                         : AnomalySignal::attack(std::move(sig), bound);
    } else {
      fail("[anomaly].kind", "expected none, fault or attack, got '" + kind + "'", a["kind"]);
    }
  }

  const YAML::Node o = section(root, "observer", true);
  check_keys(o, "[observer]", {"L", "Q", "design", "tau", "eps", "sliding_tol"});
  const double tau = o["tau"] ? as_double(o["tau"], "[observer].tau") : kDefaultTau;
  const double eps = o["eps"] ? as_double(o["eps"], "[observer].eps") : kDefaultBoundaryLayer;
  std::optional<double> sliding_tol;
  if (o["sliding_tol"]) sliding_tol = as_double(o["sliding_tol"], "[observer].sliding_tol");
  if (o["L"].IsDefined() == o["design"].IsDefined()) {
    fail("[observer]", "exactly one of 'L' or 'design' is required", o);
  }
  std::optional<ObserverDesign> observer;
  if (o["L"]) {
    Matrix L = as_matrix(o["L"], "[observer].L", n, n);
    Matrix Q = o["Q"] ? as_matrix(o["Q"], "[observer].Q", n, n) : Matrix::Identity(n, n);
    GainReport report = validate_direct_gain(L, plant.A(), anomaly.eta_bound(), Q);
    observer = rethrow_at("[observer]", o, [&] {
      return ObserverDesign::direct(std::move(L), std::move(report), tau, eps, sliding_tol);
    });
  } else {
    if (o["Q"]) fail("[observer].Q", "put Q inside the design block", o["Q"]);
    const YAML::Node d = o["design"];
    check_keys(d, "[observer].design", {"Q", "gamma", "M"});
    Matrix Q = Matrix::Identity(n, n);
    if (d["Q"]) {
      if (d["Q"].IsScalar()) {
        Q = parse_matrix_literal(d["Q"].Scalar(), n, "[observer].design.Q");
      } else {
        Q = as_matrix(d["Q"], "[observer].design.Q", n, n);
      }
    }
    const double M = d["M"] ? as_double(d["M"], "[observer].design.M") : anomaly.eta_bound();
    std::optional<double> gamma;
    if (d["gamma"] && !(d["gamma"].IsScalar() && d["gamma"].Scalar() == "auto")) {
      gamma = as_double(d["gamma"], "[observer].design.gamma");
    }
    const Matrix P = rethrow_at("[observer].design.Q", d, [&] { return solve_lyapunov(plant.A(), Q); });
    LyapunovCertificate cert = certify(plant.A(), Q, gamma.value_or(default_gamma(P, M)), M);
    observer = rethrow_at("[observer]", o, [&] {
      return ObserverDesign::certified(std::move(cert), tau, eps, sliding_tol);
    });
  }

  return Scenario(std::move(plant), std::move(anomaly), std::move(input), std::move(*observer),
                  std::move(x0), std::move(x_hat0), settings, std::move(name));
}

YAML::Node matrix_to_yaml(const Matrix& m) {
  YAML::Node rows(YAML::NodeType::Sequence);
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_yaml(m.row(r).transpose()));
  return flow(rows);
}

YAML::Node signal_to_yaml(const Signal& signal) {
  YAML::Node n(YAML::NodeType::Map);
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Signal::Constant>) {
          n["kind"] = "constant";
          n["value"] = vector_to_yaml(k.value);
        } else if constexpr (std::is_same_v<K, Signal::Step>) {
          n["kind"] = "step";
          n["time"] = k.time;
          n["before"] = vector_to_yaml(k.before);
          n["after"] = vector_to_yaml(k.after);
        } else if constexpr (std::is_same_v<K, Signal::Ramp>) {
          n["kind"] = "ramp";
          n["start"] = k.start;
          n["slope"] = vector_to_yaml(k.slope);
          n["offset"] = vector_to_yaml(k.offset);
        } else if constexpr (std::is_same_v<K, Signal::ExpSaturation>) {
          n["kind"] = "exponential-saturation";
          n["amplitude"] = vector_to_yaml(k.amplitude);
          n["rate"] = k.rate;
        } else if constexpr (std::is_same_v<K, Signal::Sinusoid>) {
          n["kind"] = "sinusoid";
          n["amplitude"] = vector_to_yaml(k.amplitude);
          n["omega"] = k.omega;
          n["phase"] = k.phase;
        } else if constexpr (std::is_same_v<K, Signal::Piecewise>) {
          n["kind"] = "piecewise-samples";
          YAML::Node times(YAML::NodeType::Sequence);
          for (double t : k.times) times.push_back(t);
          n["times"] = flow(times);
          YAML::Node values(YAML::NodeType::Sequence);
          for (const auto& v : k.values) values.push_back(vector_to_yaml(v));
          n["values"] = flow(values);
        } else {
          n["kind"] = "composite-sum";
          YAML::Node terms(YAML::NodeType::Sequence);
          for (const auto& t : k.terms) terms.push_back(signal_to_yaml(t));
          n["terms"] = terms;
          YAML::Node weights(YAML::NodeType::Sequence);
          for (double w : k.weights) weights.push_back(w);
          n["weights"] = flow(weights);
        }
      },
      signal.kind());
  return n;
}

YAML::Node scenario_to_yaml(const Scenario& sc) {
  YAML::Node root(YAML::NodeType::Map);
  if (!sc.name().empty()) root["name"] = sc.name();
  YAML::Node plant(YAML::NodeType::Map);
  plant["A"] = matrix_to_yaml(sc.plant().A());
  plant["B"] = matrix_to_yaml(sc.plant().B());
  plant["E"] = matrix_to_yaml(sc.plant().E());
  root["plant"] = plant;

  YAML::Node anomaly(YAML::NodeType::Map);
  anomaly["kind"] = std::string(to_string(sc.anomaly().kind()));
  if (sc.anomaly().signal()) anomaly["signal"] = signal_to_yaml(*sc.anomaly().signal());
  anomaly["M"] = sc.anomaly().eta_bound();
  root["anomaly"] = anomaly;

  root["input"] = signal_to_yaml(sc.input());

  YAML::Node obs(YAML::NodeType::Map);
  obs["L"] = matrix_to_yaml(sc.observer().L());
  if (sc.observer().certificate()) obs["Q"] = matrix_to_yaml(sc.observer().certificate()->Q);
  obs["tau"] = sc.observer().tau();
  obs["eps"] = sc.observer().eps();
  obs["sliding_tol"] = sc.observer().sliding_tol();
  root["observer"] = obs;

  const auto& st = sc.settings();
  YAML::Node sim(YAML::NodeType::Map);
  sim["x0"] = vector_to_yaml(sc.x0());
  sim["x_hat0"] = vector_to_yaml(sc.x_hat0());
  sim["T"] = st.horizon;
  sim["dt"] = st.dt;
  sim["delta_rel"] = st.delta_rel;
  sim["metric_floor"] = st.metric_floor;
  sim["trailing_fraction"] = st.trailing_fraction;
  sim["dwell_steps"] = st.dwell_steps;
  sim["record_every"] = st.record_every;
  sim["seed"] = st.seed;
  root["sim"] = sim;
  return root;
}

Vector parse_vector_literal(const std::string& text, const std::string& field) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
        throw std::invalid_argument(item);
      }
      values.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(field, "expected comma-separated numbers, got '" + text + "'");
    }
  }
  if (values.empty()) throw ParseError(field, "expected at least one number");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Matrix parse_matrix_literal(const std::string& text, Index n, const std::string& field) {
  if (text == "identity" || text == "I") {
    if (n < 1) throw ParseError(field, "identity needs a known dimension");
    return Matrix::Identity(n, n);
  }
  if (text.rfind("diag:", 0) == 0) {
    const Vector d = parse_vector_literal(text.substr(5), field);
    if (n >= 1 && d.size() != n) {
      throw ParseError(field, "expected " + std::to_string(n) + " diagonal entries");
    }
    return d.asDiagonal();
  }
  std::vector<Vector> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    rows.push_back(parse_vector_literal(row, field + " row " + std::to_string(rows.size() + 1)));
  }
  if (rows.empty()) throw ParseError(field, "empty matrix literal");
  Matrix m(static_cast<Index>(rows.size()), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw ParseError(field + " row " + std::to_string(r + 1), "inconsistent column count");
    }
    m.row(static_cast<Index>(r)) = rows[r].transpose();
  }
  if (n >= 1 && (m.rows() != n || m.cols() != n)) {
    throw ParseError(field, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  return m;
}

}  // namespace cpsdiag::cli
