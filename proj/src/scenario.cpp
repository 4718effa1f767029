#include "epr/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "epr/util.hpp"

namespace epr {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError("scenario: " + path + ": " + what);
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

double get_num(const json& obj, const std::string& path, const char* key,
               double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path + key, "must be finite");
  return d;
}

std::int64_t get_int(const json& obj, const std::string& path, const char* key,
                     std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::array<double, 2> get_angle_pair(const json& obj, const char* key,
                                     std::array<double, 2> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    fail(key, "expected an array of 2 numbers (degrees)");
  }
  std::array<double, 2> out{v[0].get<double>(), v[1].get<double>()};
  if (!std::isfinite(out[0]) || !std::isfinite(out[1])) {
    fail(key, "angles must be finite");
  }
  return out;
}

DensityMatrix parse_state(const json& v, ScenarioConfig& cfg) {
  if (v.is_string()) {
    if (v.get<std::string>() == "singlet") {
      cfg.state_is_singlet = true;
      return singlet_density();
    }
    fail("state", "unknown state '" + v.get<std::string>() +
                      "' (use \"singlet\" or {re, im} matrices)");
  }
  if (!v.is_object()) fail("state", "expected \"singlet\" or an object");
  expect_keys(v, "state", {"re", "im"});
  DensityMatrix rho = DensityMatrix::Zero();
  auto read_matrix = [&](const char* key, bool imaginary) {
    if (!v.contains(key)) {
      if (!imaginary) fail("state.re", "missing");
      return;
    }
    const json& m = v.at(key);
    if (!m.is_array() || m.size() != 4) {
      fail(std::string("state.") + key, "expected a 4x4 array");
    }
    for (int i = 0; i < 4; ++i) {
      if (!m[i].is_array() || m[i].size() != 4) {
        fail(std::string("state.") + key, "expected a 4x4 array");
      }
      for (int j = 0; j < 4; ++j) {
        if (!m[i][j].is_number()) {
          fail(std::string("state.") + key, "entries must be numbers");
        }
        const double x = m[i][j].get<double>();
        rho(i, j) += imaginary ? std::complex<double>(0.0, x)
                               : std::complex<double>(x, 0.0);
      }
    }
  };
  read_matrix("re", false);
  read_matrix("im", true);
  const auto violations = density_violations(rho);
  if (!violations.empty()) fail("state", violations.front());
  cfg.state_is_singlet = false;
  return rho;
}

json angles_json(const std::array<double, 2>& a) { return json::array({a[0], a[1]}); }

}  // namespace

MeasurementAngles ScenarioConfig::angles() const {
  MeasurementAngles m;
  for (int i = 0; i < 2; ++i) {
    m.alice[i] = alice_angles_deg[i] * kDegToRad;
    m.bob[i] = bob_angles_deg[i] * kDegToRad;
  }
  return m;
}

MlpLayout ScenarioConfig::mlp_layout() const {
  MlpLayout l;
  l.layer_sizes.clear();
  l.layer_sizes.push_back(8);
  for (int h : mlp_hidden_sizes) l.layer_sizes.push_back(h);
  l.layer_sizes.push_back(2);
  return l;
}

double ScenarioConfig::learning_rate() const {
  if (train.learning_rate) return *train.learning_rate;
  return reward_model == RewardKind::Ansatz ? 0.05 : 0.003;
}

HiddenVariable ScenarioConfig::hidden_sample(std::uint64_t seed,
                                             std::uint64_t index) const {
  const double u = uniform01_at(seed, index);
  const double lo = hidden_var.low_deg * kDegToRad;
  const double hi = hidden_var.high_deg * kDegToRad;
  return {lo + u * (hi - lo)};
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return alice_angles_deg == o.alice_angles_deg &&
         bob_angles_deg == o.bob_angles_deg &&
         state_is_singlet == o.state_is_singlet &&
         (state - o.state).cwiseAbs().maxCoeff() == 0.0 &&
         reward_model == o.reward_model &&
         mlp_hidden_sizes == o.mlp_hidden_sizes &&
         hidden_var == o.hidden_var && train == o.train && run == o.run &&
         universe_player == o.universe_player;
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::string stripped = text;
  // Tolerate a whitespace-only document: all defaults.
  if (stripped.find_first_not_of(" \t\r\n") == std::string::npos) {
    stripped = "{}";
  }
  json doc;
  try {
    doc = json::parse(stripped);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("scenario: top level must be an object");
  expect_keys(doc, "",
              {"alice_angles", "bob_angles", "state", "reward_model", "mlp",
               "hidden_var", "train", "run", "universe_player"});

  cfg.alice_angles_deg = get_angle_pair(doc, "alice_angles", cfg.alice_angles_deg);
  cfg.bob_angles_deg = get_angle_pair(doc, "bob_angles", cfg.bob_angles_deg);
  if (cfg.alice_angles_deg[0] == cfg.alice_angles_deg[1]) {
    cfg.warnings.push_back("alice_angles are equal: degenerate scenario");
  }
  if (cfg.bob_angles_deg[0] == cfg.bob_angles_deg[1]) {
    cfg.warnings.push_back("bob_angles are equal: degenerate scenario");
  }

  if (doc.contains("state")) cfg.state = parse_state(doc.at("state"), cfg);

  if (doc.contains("reward_model")) {
    const json& v = doc.at("reward_model");
    if (!v.is_string()) fail("reward_model", "expected \"ansatz\" or \"mlp\"");
    const std::string s = v.get<std::string>();
    if (s == "ansatz") {
      cfg.reward_model = RewardKind::Ansatz;
    } else if (s == "mlp") {
      cfg.reward_model = RewardKind::Mlp;
    } else {
      fail("reward_model", "unknown model '" + s + "'");
    }
  }

  if (doc.contains("mlp")) {
    const json& v = doc.at("mlp");
    if (!v.is_object()) fail("mlp", "expected an object");
    expect_keys(v, "mlp", {"hidden_sizes"});
    if (v.contains("hidden_sizes")) {
      const json& h = v.at("hidden_sizes");
      if (!h.is_array() || h.empty()) {
        fail("mlp.hidden_sizes", "expected a nonempty array of integers");
      }
      cfg.mlp_hidden_sizes.clear();
      for (const auto& e : h) {
        if (!e.is_number_integer() || e.get<int>() <= 0) {
          fail("mlp.hidden_sizes", "sizes must be positive integers");
        }
        cfg.mlp_hidden_sizes.push_back(e.get<int>());
      }
    }
  }

  if (doc.contains("hidden_var")) {
    const json& v = doc.at("hidden_var");
    if (!v.is_object()) fail("hidden_var", "expected an object");
    expect_keys(v, "hidden_var", {"kind", "low", "high"});
    if (v.contains("kind")) {
      const std::string kind = v.at("kind").get<std::string>();
      if (kind == "sphere") {
        fail("hidden_var.kind",
             "\"sphere\" is reserved for a 3-component hidden variable and "
             "not implemented");
      }
      if (kind != "uniform_angle") {
        fail("hidden_var.kind", "unknown kind '" + kind + "'");
      }
    }
    cfg.hidden_var.low_deg = get_num(v, "hidden_var.", "low", 0.0);
    cfg.hidden_var.high_deg = get_num(v, "hidden_var.", "high", 360.0);
    if (!(cfg.hidden_var.high_deg > cfg.hidden_var.low_deg)) {
      fail("hidden_var", "high must exceed low");
    }
  }

  if (doc.contains("train")) {
    const json& v = doc.at("train");
    if (!v.is_object()) fail("train", "expected an object");
    expect_keys(v, "train",
                {"learning_rate", "batch_size", "steps", "temperature", "seed",
                 "optimizer", "beta1", "beta2", "epsilon",
                 "checkpoint_interval", "soft_rounds"});
    if (v.contains("learning_rate")) {
      cfg.train.learning_rate = get_num(v, "train.", "learning_rate", 0.0);
      if (*cfg.train.learning_rate <= 0) fail("train.learning_rate", "must be positive");
    }
    cfg.train.batch_size =
        static_cast<int>(get_int(v, "train.", "batch_size", cfg.train.batch_size));
    if (cfg.train.batch_size <= 0) fail("train.batch_size", "must be positive");
    cfg.train.steps = get_int(v, "train.", "steps", cfg.train.steps);
    if (cfg.train.steps < 0) fail("train.steps", "must be nonnegative");
    cfg.train.seed = static_cast<std::uint64_t>(
        get_int(v, "train.", "seed", static_cast<std::int64_t>(cfg.train.seed)));
    if (v.contains("temperature")) {
      const json& t = v.at("temperature");
      if (!t.is_object()) fail("train.temperature", "expected an object");
      expect_keys(t, "train.temperature", {"start", "end", "shape"});
      cfg.train.temperature.tau_start =
          get_num(t, "train.temperature.", "start", cfg.train.temperature.tau_start);
      cfg.train.temperature.tau_end =
          get_num(t, "train.temperature.", "end", cfg.train.temperature.tau_end);
      if (t.contains("shape")) {
        const std::string s = t.at("shape").get<std::string>();
        if (s == "geometric") {
          cfg.train.temperature.shape = TemperatureSchedule::Shape::Geometric;
        } else if (s == "linear") {
          cfg.train.temperature.shape = TemperatureSchedule::Shape::Linear;
        } else {
          fail("train.temperature.shape", "expected geometric or linear");
        }
      }
      if (!(cfg.train.temperature.tau_start >= cfg.train.temperature.tau_end &&
            cfg.train.temperature.tau_end > 0)) {
        fail("train.temperature", "requires start >= end > 0");
      }
    }
    if (v.contains("optimizer")) {
      const std::string s = v.at("optimizer").get<std::string>();
      if (s == "adam") {
        cfg.train.optimizer = OptimizerKind::Adam;
      } else if (s == "sgd") {
        cfg.train.optimizer = OptimizerKind::Sgd;
      } else {
        fail("train.optimizer", "expected adam or sgd");
      }
    }
    cfg.train.beta1 = get_num(v, "train.", "beta1", cfg.train.beta1);
    cfg.train.beta2 = get_num(v, "train.", "beta2", cfg.train.beta2);
    cfg.train.epsilon = get_num(v, "train.", "epsilon", cfg.train.epsilon);
    cfg.train.checkpoint_interval =
        get_int(v, "train.", "checkpoint_interval", cfg.train.checkpoint_interval);
    cfg.train.soft_rounds = static_cast<int>(
        get_int(v, "train.", "soft_rounds", cfg.train.soft_rounds));
    if (cfg.train.soft_rounds < 1) fail("train.soft_rounds", "must be >= 1");
  }

  // The annealing window always spans the configured training run.
  cfg.train.temperature.total_steps = cfg.train.steps;

  if (doc.contains("run")) {
    const json& v = doc.at("run");
    if (!v.is_object()) fail("run", "expected an object");
    expect_keys(v, "run", {"runs", "seed"});
    cfg.run.runs = get_int(v, "run.", "runs", cfg.run.runs);
    if (cfg.run.runs < 1) fail("run.runs", "must be >= 1");
    cfg.run.seed = static_cast<std::uint64_t>(
        get_int(v, "run.", "seed", static_cast<std::int64_t>(cfg.run.seed)));
  }

  if (doc.contains("universe_player")) {
    const json& v = doc.at("universe_player");
    if (!v.is_boolean()) fail("universe_player", "expected a boolean");
    cfg.universe_player = v.get<bool>();
  }
  return cfg;
}

std::string serialize_scenario(const ScenarioConfig& c) {
  json doc;
  doc["alice_angles"] = angles_json(c.alice_angles_deg);
  doc["bob_angles"] = angles_json(c.bob_angles_deg);
  if (c.state_is_singlet) {
    doc["state"] = "singlet";
  } else {
    json re = json::array(), im = json::array();
    for (int i = 0; i < 4; ++i) {
      json rrow = json::array(), irow = json::array();
      for (int j = 0; j < 4; ++j) {
        rrow.push_back(c.state(i, j).real());
        irow.push_back(c.state(i, j).imag());
      }
      re.push_back(rrow);
      im.push_back(irow);
    }
    doc["state"] = {{"re", re}, {"im", im}};
  }
  doc["reward_model"] = c.reward_model == RewardKind::Ansatz ? "ansatz" : "mlp";
  doc["mlp"] = {{"hidden_sizes", c.mlp_hidden_sizes}};
  doc["hidden_var"] = {{"kind", "uniform_angle"},
                       {"low", c.hidden_var.low_deg},
                       {"high", c.hidden_var.high_deg}};
  json train = {
      {"batch_size", c.train.batch_size},
      {"steps", c.train.steps},
      {"temperature",
       {{"start", c.train.temperature.tau_start},
        {"end", c.train.temperature.tau_end},
        {"shape", c.train.temperature.shape == TemperatureSchedule::Shape::Geometric
                      ? "geometric"
                      : "linear"}}},
      {"seed", c.train.seed},
      {"optimizer", c.train.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
      {"beta1", c.train.beta1},
      {"beta2", c.train.beta2},
      {"epsilon", c.train.epsilon},
      {"checkpoint_interval", c.train.checkpoint_interval},
      {"soft_rounds", c.train.soft_rounds},
  };
  if (c.train.learning_rate) train["learning_rate"] = *c.train.learning_rate;
  doc["train"] = train;
  doc["run"] = {{"runs", c.run.runs}, {"seed", c.run.seed}};
  doc["universe_player"] = c.universe_player;
  return doc.dump(2) + "\n";
}

std::string scenario_hash(const ScenarioConfig& config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(serialize_scenario(config))));
  return buf;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

Game build_outcome_subgame(const ScenarioConfig& config, SettingPair pair) {
  if (pair.a < 0 || pair.a > 1 || pair.b < 0 || pair.b > 1) {
    throw InputError("setting pair indices must be 0 or 1");
  }
  Game g;
  g.player_count = config.universe_player ? 3 : 2;
  g.root = 0;
  g.nodes.resize(7);
  const std::vector<double> zero(g.player_count, 0.0);

  auto decision = [&](NodeId id, PlayerId owner, InfosetId is, NodeId plus,
                      NodeId minus) {
    Node n;
    n.id = id;
    n.kind = NodeKind::Decision;
    n.owner = owner;
    n.infoset = is;
    n.children = {{"+1", plus}, {"-1", minus}};
    g.nodes[id] = std::move(n);
  };
  decision(0, 0, 0, 1, 2);
  decision(1, 1, 1, 3, 4);
  decision(2, 1, 1, 5, 6);
  for (NodeId id = 3; id <= 6; ++id) {
    Node n;
    n.id = id;
    n.kind = NodeKind::Leaf;
    n.payoffs = zero;
    g.nodes[id] = std::move(n);
  }
  g.infosets.resize(2);
  g.infosets[0] = {0, 0, {"+1", "-1"}, {0}};
  g.infosets[1] = {1, 1, {"+1", "-1"}, {1, 2}};
  return g;
}

}  // namespace epr
