#include "epr/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "epr/pte_soft.hpp"
#include "epr/util.hpp"

namespace epr {

namespace {

std::string param_name(const ParamVector& params, int j) {
  for (const auto& s : params.layout) {
    if (j >= s.offset && j < s.offset + s.length) {
      return s.name + "[" + std::to_string(j - s.offset) + "]";
    }
  }
  return "param[" + std::to_string(j) + "]";
}

}  // namespace

ExpectedWithGrad expected_histogram(const RewardModel& model,
                                    const MeasurementAngles& angles,
                                    double tau,
                                    std::span<const HiddenVariable> batch,
                                    int soft_rounds, int workers) {
  if (batch.empty()) throw InputError("expected_histogram: empty batch");
  if (tau <= 0) throw InputError("expected_histogram: tau must be positive");
  const int n_params = model.params.size();
  const std::int64_t batch_size = static_cast<std::int64_t>(batch.size());
  const std::int64_t stride = 16 + 16 * static_cast<std::int64_t>(n_params);
  // Slot 0..15: cells; 16..: per-cell parameter gradients. One slot per
  // lambda keeps the reduction order independent of the worker partition.
  std::vector<double> slots(stride * batch_size, 0.0);
  std::vector<std::int64_t> floor_flags(batch_size, 0);

  // One subgame shape serves every pair.
  ScenarioConfig shape_cfg;  // defaults suffice for the tree shape
  const Game shape = build_outcome_subgame(shape_cfg, SettingPair{0, 0});
  const SolverContext ctx(shape);
  const double inv_mass = 1.0 / (4.0 * static_cast<double>(batch_size));

  parallel_for(batch_size, workers, [&](std::int64_t lo, std::int64_t hi) {
    Tape tape;
    std::array<double, 8> payoffs;
    std::vector<double> pay_grad(8 * n_params);
    for (std::int64_t i = lo; i < hi; ++i) {
      double* slot = slots.data() + i * stride;
      for (const SettingPair& pr : setting_pairs()) {
        fill_subgame_payoffs(model, batch[i], angles, pr, payoffs);
        const SoftSolveGrad sg =
            soft_solve_with_gradient(ctx, payoffs, tau, soft_rounds, tape);
        if (sg.result.numeric_floor) floor_flags[i]++;
        fill_subgame_payoff_gradients(model, batch[i], angles, pr, pay_grad);
        for (int k = 0; k < 4; ++k) {
          const int cell = cell_index(pr, k);
          slot[cell] += sg.result.distribution[k] * inv_mass;
          double* gcell = slot + 16 + static_cast<std::int64_t>(cell) * n_params;
          const double* jac = sg.jacobian.data() + static_cast<size_t>(k) * 8;
          for (int e = 0; e < 8; ++e) {
            const double je = jac[e] * inv_mass;
            if (je == 0.0) continue;
            const double* pg = pay_grad.data() + static_cast<size_t>(e) * n_params;
            for (int j = 0; j < n_params; ++j) gcell[j] += je * pg[j];
          }
        }
      }
    }
  });

  tree_reduce_slots(slots, batch_size, stride);

  ExpectedWithGrad out;
  for (int c = 0; c < 16; ++c) out.hist.cells[c] = slots[c];
  out.grad.assign(slots.begin() + 16, slots.begin() + stride);
  for (std::int64_t f : floor_flags) out.floor_warnings += f;
  return out;
}

KlResult kl_divergence(const std::array<double, 16>& p,
                       const std::array<double, 16>& q, double eps) {
  if (eps <= 0) throw InputError("kl_divergence: eps must be positive");
  const double norm = 1.0 + 16.0 * eps;
  KlResult r;
  for (int c = 0; c < 16; ++c) {
    const double pt = (p[c] + eps) / norm;
    const double qt = (q[c] + eps) / norm;
    const double lr = std::log(pt / qt);
    r.value += pt * lr;
    r.grad[c] = (lr + 1.0) / norm;
  }
  return r;
}

TrainState init_train_state(const ScenarioConfig& config) {
  TrainState st;
  st.seed = config.train.seed;
  st.temperature = anneal_temperature(0, config.train.temperature);
  // Parameter-init stream is decoupled from the batch stream.
  const std::uint64_t init_seed = config.train.seed ^ 0x1517f0d1a5a5a5a5ULL;
  if (config.reward_model == RewardKind::Ansatz) {
    const double offset = uniform01_at(init_seed, 0) * 2.0 * std::numbers::pi;
    st.model = RewardModel::make_ansatz(offset);
  } else {
    st.model = RewardModel::make_mlp(config.mlp_layout(), init_seed);
  }
  st.adam_m.assign(st.model.params.size(), 0.0);
  st.adam_v.assign(st.model.params.size(), 0.0);
  return st;
}

TrainState state_from_checkpoint(const Checkpoint& cp,
                                 const ScenarioConfig& config) {
  if (cp.model.kind != config.reward_model) {
    throw InputError(
        "checkpoint model kind does not match the scenario's reward_model");
  }
  TrainState st;
  st.model = cp.model;
  st.seed = config.train.seed;
  st.temperature = anneal_temperature(0, config.train.temperature);
  st.adam_m.assign(st.model.params.size(), 0.0);
  st.adam_v.assign(st.model.params.size(), 0.0);
  if (cp.train) {
    st.step = cp.train->step;
    st.temperature = cp.train->temperature;
    st.seed = cp.train->seed;
    st.next_index = cp.train->next_index;
    if (!cp.train->adam_m.empty()) {
      if (cp.train->adam_m.size() != st.adam_m.size() ||
          cp.train->adam_v.size() != st.adam_v.size()) {
        throw InputError("checkpoint optimizer state size mismatch");
      }
      st.adam_m = cp.train->adam_m;
      st.adam_v = cp.train->adam_v;
    }
  }
  return st;
}

void train_step(TrainState& state, const ScenarioConfig& config,
                const TargetDistribution& target, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  const double tau = anneal_temperature(state.step, config.train.temperature);

  std::vector<HiddenVariable> batch(config.train.batch_size);
  for (int i = 0; i < config.train.batch_size; ++i) {
    batch[i] = config.hidden_sample(state.seed, state.next_index + i);
  }
  state.next_index += config.train.batch_size;

  const auto eh = expected_histogram(state.model, config.angles(), tau, batch,
                                     config.train.soft_rounds, workers);
  const auto kl = kl_divergence(eh.hist.cells, target.cells);
  if (!std::isfinite(kl.value)) {
    for (int c = 0; c < 16; ++c) {
      if (!std::isfinite(eh.hist.cells[c])) {
        throw NumericError("train_step: non-finite expected mass in cell " +
                           cell_label(c) + " at step " +
                           std::to_string(state.step));
      }
    }
    throw NumericError("train_step: non-finite loss at step " +
                       std::to_string(state.step));
  }

  const int n = state.model.params.size();
  std::vector<double> grad(n, 0.0);
  for (int c = 0; c < 16; ++c) {
    const double g = kl.grad[c];
    const double* row = eh.grad.data() + static_cast<size_t>(c) * n;
    for (int j = 0; j < n; ++j) grad[j] += g * row[j];
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(grad[j])) {
      throw NumericError("train_step: non-finite gradient for " +
                         param_name(state.model.params, j) + " at step " +
                         std::to_string(state.step));
    }
  }

  const double lr = config.learning_rate();
  if (config.train.optimizer == OptimizerKind::Adam) {
    const double b1 = config.train.beta1, b2 = config.train.beta2;
    const double t = static_cast<double>(state.step + 1);
    const double corr1 = 1.0 - std::pow(b1, t);
    const double corr2 = 1.0 - std::pow(b2, t);
    for (int j = 0; j < n; ++j) {
      state.adam_m[j] = b1 * state.adam_m[j] + (1.0 - b1) * grad[j];
      state.adam_v[j] = b2 * state.adam_v[j] + (1.0 - b2) * grad[j] * grad[j];
      const double mhat = state.adam_m[j] / corr1;
      const double vhat = state.adam_v[j] / corr2;
      state.model.params.values[j] -=
          lr * mhat / (std::sqrt(vhat) + config.train.epsilon);
    }
  } else {
    for (int j = 0; j < n; ++j) {
      state.model.params.values[j] -= lr * grad[j];
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  LossEntry e;
  e.step = state.step;
  e.loss = kl.value;
  e.temperature = tau;
  e.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  state.history.push_back(e);

  state.step += 1;
  state.temperature = tau;
}

TrainState train(const ScenarioConfig& config, const TrainPaths& paths,
                 int workers, const TrainState* resume) {
  TrainState state = resume ? *resume : init_train_state(config);
  const TargetDistribution target =
      target_histogram(config.state, config.angles());
  const std::string hash = scenario_hash(config);

  auto checkpoint_of = [&](const TrainState& st) {
    Checkpoint cp;
    cp.model = st.model;
    cp.config_hash = hash;
    TrainExtras ex;
    ex.step = st.step;
    ex.temperature = st.temperature;
    ex.seed = st.seed;
    ex.next_index = st.next_index;
    ex.adam_m = st.adam_m;
    ex.adam_v = st.adam_v;
    cp.train = ex;
    return cp;
  };

  while (state.step < config.train.steps) {
    train_step(state, config, target, workers);
    if (!paths.checkpoint.empty() && config.train.checkpoint_interval > 0 &&
        state.step % config.train.checkpoint_interval == 0 &&
        state.step < config.train.steps) {
      write_checkpoint(paths.checkpoint, checkpoint_of(state));
    }
  }
  if (!paths.checkpoint.empty()) {
    write_checkpoint(paths.checkpoint, checkpoint_of(state));
  }
  if (!paths.loss_csv.empty()) {
    write_loss_csv(paths.loss_csv, state.history,
                   {"eprlab v" + std::string(kEprlabVersion) + " loss history",
                    "config_hash: " + hash,
                    "seed: " + std::to_string(state.seed)});
  }
  return state;
}

void write_loss_csv(const std::string& path,
                    const std::vector<LossEntry>& history,
                    const std::vector<std::string>& provenance) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open for writing: " + path);
  for (const auto& line : provenance) f << "# " << line << "\n";
  f << "step,loss,temperature,wall_time_ms\n";
  for (const auto& e : history) {
    f << e.step << ',' << format_double(e.loss) << ','
      << format_double(e.temperature) << ',' << format_double(e.wall_ms)
      << "\n";
  }
  if (!f) throw InputError("failed writing: " + path);
}

}  // namespace epr
