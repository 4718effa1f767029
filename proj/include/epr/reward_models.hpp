#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epr/types.hpp"

namespace epr {

struct ParamSlice {
  std::string name;
  int offset = 0;
  int length = 0;
};

/// Flat learnable parameters with named slices partitioning the vector.
struct ParamVector {
  std::vector<double> values;
  std::vector<ParamSlice> layout;

  bool has_slice(std::string_view name) const;
  std::span<const double> slice(std::string_view name) const;  // throws
  std::span<double> slice(std::string_view name);
  int size() const { return static_cast<int>(values.size()); }
};

enum class RewardKind { Ansatz, Mlp };

struct MlpLayout {
  std::vector<int> layer_sizes = {8, 16, 16, 2};  // input ... output
};

struct RewardModel {
  RewardKind kind = RewardKind::Ansatz;
  MlpLayout mlp;  // used when kind == Mlp
  ParamVector params;

  static RewardModel make_ansatz(double initial_offset);
  /// Weights uniform in +-1/sqrt(fan_in), deterministic in seed.
  static RewardModel make_mlp(const MlpLayout& layout, std::uint64_t seed);
};

/// Threshold-model reward for the two particle players. ParticleA's reward
/// is x*sin(lambda). ParticleB's compares the triangle wave
/// (2/pi)*asin(cos(lambda)) against cos(dhat), where
/// dhat = alice[pair.a] - (alice[pair.b] + delta): the model treats Bob's
/// basis set as Alice's shifted by the learnable offset delta, so fitting
/// recovers the actual offset between the two bases. Smooth in delta,
/// 2*pi-periodic in lambda and delta. Requires the "offset" slice.
std::array<double, 2> ansatz_payoffs(HiddenVariable lambda,
                                     const MeasurementAngles& angles,
                                     SettingPair pair, int x, int y,
                                     const ParamVector& params);

/// Feed-forward net on features
/// (cos l, sin l, onehot a, onehot b, x, y); tanh hidden, linear output;
/// output row p is player p's payoff.
std::array<double, 2> mlp_payoffs(HiddenVariable lambda,
                                  const MeasurementAngles& angles,
                                  SettingPair pair, int x, int y,
                                  const MlpLayout& layout,
                                  const ParamVector& params);

std::array<double, 2> model_payoffs(const RewardModel& model,
                                    HiddenVariable lambda,
                                    const MeasurementAngles& angles,
                                    SettingPair pair, int x, int y);

/// Exact reverse-mode d payoff_p / d params; row-major (2 x param_count).
std::vector<double> payoff_gradient(const RewardModel& model,
                                    HiddenVariable lambda,
                                    const MeasurementAngles& angles,
                                    SettingPair pair, int x, int y);

/// Payoffs for the four outcome leaves of one setting pair, leaf order
/// (+,+),(+,-),(-,+),(-,-); out[k*2 + p].
void fill_subgame_payoffs(const RewardModel& model, HiddenVariable lambda,
                          const MeasurementAngles& angles, SettingPair pair,
                          std::span<double, 8> out);

/// d payoff-entry / d params for all 8 entries; out[e * param_count + j].
void fill_subgame_payoff_gradients(const RewardModel& model,
                                   HiddenVariable lambda,
                                   const MeasurementAngles& angles,
                                   SettingPair pair, std::span<double> out);

/// Counter-based deterministic hidden-variable draw: identical
/// (seed, index) gives an identical angle on every platform and thread
/// count; uniform on [0, 2*pi).
HiddenVariable sample_hidden(std::uint64_t seed, std::uint64_t index);

/// SplitMix64 stream underlying sample_hidden; also used for parameter
/// initialization. Returns the index-th output of the stream.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index);
/// Uniform double in [0, 1) from 53 bits.
double uniform01_at(std::uint64_t seed, std::uint64_t index);

// --- Checkpoint file ------------------------------------------------------
// Plain text, one value per line in hexadecimal float encoding (bit-exact
// round-trip). Optionally carries training state so a resumed run replays
// the uninterrupted trajectory.

struct TrainExtras {
  std::int64_t step = 0;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t next_index = 0;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
};

struct Checkpoint {
  RewardModel model;
  std::optional<TrainExtras> train;
  std::string config_hash;  // provenance, informational
};

void write_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace epr
