#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "epr/quantum_target.hpp"
#include "epr/reward_models.hpp"
#include "epr/scenario.hpp"
#include "epr/types.hpp"

namespace epr {

/// Model-side 16-cell distribution (settings uniform at 1/4 per block).
struct ExpectedHistogram {
  std::array<double, 16> cells{};
};

struct ExpectedWithGrad {
  ExpectedHistogram hist;
  std::vector<double> grad;  // row-major [cell][param], 16 x param_count
  std::int64_t floor_warnings = 0;
};

/// Soft-solves all four setting pairs for every lambda in the batch and
/// averages. Per-sample contributions go to batch-index slots and reduce by
/// a fixed-order pairwise tree, so results are worker-count independent.
ExpectedWithGrad expected_histogram(const RewardModel& model,
                                    const MeasurementAngles& angles,
                                    double tau,
                                    std::span<const HiddenVariable> batch,
                                    int soft_rounds = 4, int workers = 1);

struct KlResult {
  double value = 0.0;
  std::array<double, 16> grad{};  // d KL / d p_cell
};

/// KL(p || q) with additive smoothing: p~ = (p + eps)/(1 + 16 eps), natural
/// log. Nonnegative; zero iff p == q after smoothing.
KlResult kl_divergence(const std::array<double, 16>& p,
                       const std::array<double, 16>& q, double eps = 1e-9);

struct LossEntry {
  std::int64_t step = 0;
  double loss = 0.0;
  double temperature = 0.0;
  double wall_ms = 0.0;  // excluded from determinism comparisons
};

struct TrainState {
  RewardModel model;
  std::int64_t step = 0;
  double temperature = 0.0;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::uint64_t seed = 0;
  std::uint64_t next_index = 0;  // position in the hidden-variable stream
  std::vector<LossEntry> history;
};

/// Fresh state with seeded parameter init (ansatz offset uniform in
/// [0, 2*pi); mlp weights uniform scaled by fan-in).
TrainState init_train_state(const ScenarioConfig& config);

/// Rebuilds a state from a checkpoint (resumes mid-trajectory when the
/// checkpoint carries training extras).
TrainState state_from_checkpoint(const Checkpoint& cp,
                                 const ScenarioConfig& config);

/// One optimizer step: draws the next batch from the stream, evaluates the
/// expected histogram + gradient, applies Adam (or SGD), anneals the
/// temperature, appends to the loss history. Throws NumericError naming the
/// offending cell/parameter on non-finite loss or gradient.
void train_step(TrainState& state, const ScenarioConfig& config,
                const TargetDistribution& target, int workers = 1);

struct TrainPaths {
  std::string checkpoint;  // empty: do not write
  std::string loss_csv;    // empty: do not write
};

/// Runs train_step up to config.train.steps, writing partial checkpoints
/// every checkpoint_interval steps and the final checkpoint + loss CSV.
TrainState train(const ScenarioConfig& config, const TrainPaths& paths,
                 int workers = 1, const TrainState* resume = nullptr);

void write_loss_csv(const std::string& path,
                    const std::vector<LossEntry>& history,
                    const std::vector<std::string>& provenance);

}  // namespace epr
