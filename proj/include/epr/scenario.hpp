#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epr/game.hpp"
#include "epr/pte_soft.hpp"
#include "epr/quantum_target.hpp"
#include "epr/reward_models.hpp"
#include "epr/types.hpp"

namespace epr {

enum class OptimizerKind { Adam, Sgd };

struct TrainBlock {
  std::optional<double> learning_rate;  // default depends on model kind
  int batch_size = 1024;
  std::int64_t steps = 2000;
  TemperatureSchedule temperature;
  std::uint64_t seed = 1;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t checkpoint_interval = 500;
  int soft_rounds = 4;
  bool operator==(const TrainBlock&) const = default;
};

struct RunBlock {
  std::int64_t runs = 1000000;
  std::uint64_t seed = 1000003;
  bool operator==(const RunBlock&) const = default;
};

struct HiddenVarBlock {
  // Only the planar angle model is implemented; "sphere" is reserved in the
  // schema and rejected at parse time.
  double low_deg = 0.0;
  double high_deg = 360.0;
  bool operator==(const HiddenVarBlock&) const = default;
};

/// Parsed scenario. Angles are authored in degrees (kept verbatim for exact
/// round-trips); angles() converts to radians.
struct ScenarioConfig {
  std::array<double, 2> alice_angles_deg{0.0, 90.0};
  std::array<double, 2> bob_angles_deg{45.0, 135.0};
  bool state_is_singlet = true;
  DensityMatrix state = singlet_density();
  RewardKind reward_model = RewardKind::Ansatz;
  std::vector<int> mlp_hidden_sizes = {16, 16};
  HiddenVarBlock hidden_var;
  TrainBlock train;
  RunBlock run;
  bool universe_player = false;

  std::vector<std::string> warnings;  // not serialized, not compared

  MeasurementAngles angles() const;
  MlpLayout mlp_layout() const;
  double learning_rate() const;  // resolves the kind-dependent default
  HiddenVariable hidden_sample(std::uint64_t seed, std::uint64_t index) const;

  bool operator==(const ScenarioConfig& o) const;
};

/// Parses a JSON scenario document; every field is optional and takes the
/// documented default. Throws InputError naming the offending field path.
/// An empty document (or "{}") yields the default scenario.
ScenarioConfig parse_scenario(const std::string& text);

/// Canonical JSON with all fields materialized; parse(serialize(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

/// FNV-1a of the canonical serialization, as "0x..." hex.
std::string scenario_hash(const ScenarioConfig& config);

ScenarioConfig load_scenario_file(const std::string& path);

/// The forced-settings outcome subgame: ParticleA decides +1/-1 at the
/// root, ParticleB decides +1/-1 without observing it (its two nodes share
/// one information set). Payoffs are zero placeholders, filled per
/// (lambda, params) by the reward model. Structure is identical for every
/// pair; the pair selects the payoff-filling context downstream.
Game build_outcome_subgame(const ScenarioConfig& config, SettingPair pair);

}  // namespace epr
