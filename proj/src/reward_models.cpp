#include "epr/reward_models.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "epr/util.hpp"

namespace epr {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int param_count_for(const MlpLayout& layout) {
  int n = 0;
  for (size_t l = 0; l + 1 < layout.layer_sizes.size(); ++l) {
    n += layout.layer_sizes[l] * layout.layer_sizes[l + 1] +
         layout.layer_sizes[l + 1];
  }
  return n;
}

void mlp_features(HiddenVariable lambda, SettingPair pair, int x, int y,
                  std::span<double, 8> f) {
  f[0] = std::cos(lambda.lambda);
  f[1] = std::sin(lambda.lambda);
  f[2] = pair.a == 0 ? 1.0 : 0.0;
  f[3] = pair.a == 1 ? 1.0 : 0.0;
  f[4] = pair.b == 0 ? 1.0 : 0.0;
  f[5] = pair.b == 1 ? 1.0 : 0.0;
  f[6] = static_cast<double>(x);
  f[7] = static_cast<double>(y);
}

// Forward pass keeping post-activation values per layer (needed by backprop).
std::vector<std::vector<double>> mlp_forward(const MlpLayout& layout,
                                             const ParamVector& params,
                                             std::span<const double, 8> feat) {
  const auto& sizes = layout.layer_sizes;
  std::vector<std::vector<double>> acts;
  acts.emplace_back(feat.begin(), feat.end());
  int off = 0;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    const double* W = params.values.data() + off;
    const double* b = params.values.data() + off + in * out;
    off += in * out + out;
    std::vector<double> next(out);
    const bool last = (l + 2 == sizes.size());
    for (int j = 0; j < out; ++j) {
      double s = b[j];
      for (int i = 0; i < in; ++i) s += W[j * in + i] * acts.back()[i];
      next[j] = last ? s : std::tanh(s);
    }
    acts.push_back(std::move(next));
  }
  return acts;
}

}  // namespace

bool ParamVector::has_slice(std::string_view name) const {
  for (const auto& s : layout) {
    if (s.name == name) return true;
  }
  return false;
}

std::span<const double> ParamVector::slice(std::string_view name) const {
  for (const auto& s : layout) {
    if (s.name == name) {
      return {values.data() + s.offset, static_cast<size_t>(s.length)};
    }
  }
  throw InputError("parameter slice '" + std::string(name) + "' is missing");
}

std::span<double> ParamVector::slice(std::string_view name) {
  for (const auto& s : layout) {
    if (s.name == name) {
      return {values.data() + s.offset, static_cast<size_t>(s.length)};
    }
  }
  throw InputError("parameter slice '" + std::string(name) + "' is missing");
}

RewardModel RewardModel::make_ansatz(double initial_offset) {
  RewardModel m;
  m.kind = RewardKind::Ansatz;
  m.params.values = {initial_offset};
  m.params.layout = {{"offset", 0, 1}};
  return m;
}

RewardModel RewardModel::make_mlp(const MlpLayout& layout,
                                  std::uint64_t seed) {
  RewardModel m;
  m.kind = RewardKind::Mlp;
  m.mlp = layout;
  m.params.values.resize(param_count_for(layout));
  int off = 0;
  std::uint64_t idx = 0;
  for (size_t l = 0; l + 1 < layout.layer_sizes.size(); ++l) {
    const int in = layout.layer_sizes[l], out = layout.layer_sizes[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    const std::string tag = "layer" + std::to_string(l);
    m.params.layout.push_back({tag + ".weights", off, in * out});
    for (int i = 0; i < in * out; ++i) {
      m.params.values[off + i] = (2.0 * uniform01_at(seed, idx++) - 1.0) * scale;
    }
    off += in * out;
    m.params.layout.push_back({tag + ".bias", off, out});
    // Biases start at zero.
    off += out;
  }
  return m;
}

std::array<double, 2> ansatz_payoffs(HiddenVariable lambda,
                                     const MeasurementAngles& angles,
                                     SettingPair pair, int x, int y,
                                     const ParamVector& params) {
  const double delta = params.slice("offset")[0];
  const double l = lambda.lambda;
  const double dhat = angles.alice[pair.a] - (angles.alice[pair.b] + delta);
  const double sl = std::sin(l);
  const double side = sl >= 0 ? 1.0 : -1.0;
  const double ramp = (2.0 / std::numbers::pi) * std::asin(std::cos(l));
  return {x * sl, y * side * (ramp - std::cos(dhat))};
}

std::array<double, 2> mlp_payoffs(HiddenVariable lambda,
                                  const MeasurementAngles& /*angles*/,
                                  SettingPair pair, int x, int y,
                                  const MlpLayout& layout,
                                  const ParamVector& params) {
  if (params.size() != param_count_for(layout)) {
    throw InputError("mlp parameter vector has " +
                     std::to_string(params.size()) + " values, layout needs " +
                     std::to_string(param_count_for(layout)));
  }
  if (layout.layer_sizes.front() != 8 || layout.layer_sizes.back() != 2) {
    throw InputError("mlp layout must map 8 features to 2 payoffs");
  }
  std::array<double, 8> f;
  mlp_features(lambda, pair, x, y, f);
  const auto acts = mlp_forward(layout, params, f);
  return {acts.back()[0], acts.back()[1]};
}

std::array<double, 2> model_payoffs(const RewardModel& model,
                                    HiddenVariable lambda,
                                    const MeasurementAngles& angles,
                                    SettingPair pair, int x, int y) {
  if (model.kind == RewardKind::Ansatz) {
    return ansatz_payoffs(lambda, angles, pair, x, y, model.params);
  }
  return mlp_payoffs(lambda, angles, pair, x, y, model.mlp, model.params);
}

std::vector<double> payoff_gradient(const RewardModel& model,
                                    HiddenVariable lambda,
                                    const MeasurementAngles& angles,
                                    SettingPair pair, int x, int y) {
  const int n = model.params.size();
  std::vector<double> grad(2 * n, 0.0);
  if (model.kind == RewardKind::Ansatz) {
    const double delta = model.params.slice("offset")[0];
    const double dhat = angles.alice[pair.a] - (angles.alice[pair.b] + delta);
    const double side = std::sin(lambda.lambda) >= 0 ? 1.0 : -1.0;
    // d payoff_B / d delta: payoff_B = y*side*(ramp - cos(dhat)),
    // d(-cos dhat)/d delta = sin(dhat) * d dhat/d delta = -sin(dhat).
    grad[0] = 0.0;
    grad[n] = -y * side * std::sin(dhat);
    return grad;
  }

  const auto& sizes = model.mlp.layer_sizes;
  std::array<double, 8> f;
  mlp_features(lambda, pair, x, y, f);
  const auto acts = mlp_forward(model.mlp, model.params, f);
  const int layers = static_cast<int>(sizes.size()) - 1;
  // Per-layer parameter offsets.
  std::vector<int> offs(layers);
  {
    int off = 0;
    for (int l = 0; l < layers; ++l) {
      offs[l] = off;
      off += sizes[l] * sizes[l + 1] + sizes[l + 1];
    }
  }
  for (int p = 0; p < 2; ++p) {
    std::vector<double> d(acts.back().size(), 0.0);
    d[p] = 1.0;  // seed at the output row
    for (int l = layers - 1; l >= 0; --l) {
      const int in = sizes[l], out = sizes[l + 1];
      const double* W = model.params.values.data() + offs[l];
      double* gW = grad.data() + p * n + offs[l];
      double* gb = gW + in * out;
      std::vector<double> dprev(in, 0.0);
      for (int j = 0; j < out; ++j) {
        const double dj = d[j];
        gb[j] += dj;
        for (int i = 0; i < in; ++i) {
          gW[j * in + i] += dj * acts[l][i];
          dprev[i] += dj * W[j * in + i];
        }
      }
      if (l > 0) {
        for (int i = 0; i < in; ++i) {
          dprev[i] *= 1.0 - acts[l][i] * acts[l][i];  // tanh'
        }
      }
      d = std::move(dprev);
    }
  }
  return grad;
}

void fill_subgame_payoffs(const RewardModel& model, HiddenVariable lambda,
                          const MeasurementAngles& angles, SettingPair pair,
                          std::span<double, 8> out) {
  for (int k = 0; k < 4; ++k) {
    const auto u =
        model_payoffs(model, lambda, angles, pair, outcome_x(k), outcome_y(k));
    out[k * 2] = u[0];
    out[k * 2 + 1] = u[1];
  }
}

void fill_subgame_payoff_gradients(const RewardModel& model,
                                   HiddenVariable lambda,
                                   const MeasurementAngles& angles,
                                   SettingPair pair, std::span<double> out) {
  const int n = model.params.size();
  for (int k = 0; k < 4; ++k) {
    const auto g =
        payoff_gradient(model, lambda, angles, pair, outcome_x(k), outcome_y(k));
    for (int p = 0; p < 2; ++p) {
      for (int j = 0; j < n; ++j) {
        out[(k * 2 + p) * n + j] = g[p * n + j];
      }
    }
  }
}

namespace {
std::uint64_t splitmix_finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}
}  // namespace

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
  return splitmix_finalize(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

double uniform01_at(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(splitmix64_at(seed, index) >> 11) * 0x1.0p-53;
}

HiddenVariable sample_hidden(std::uint64_t seed, std::uint64_t index) {
  return {uniform01_at(seed, index) * kTwoPi};
}

// --- checkpoint io ---------------------------------------------------------

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open checkpoint for writing: " + path);
  f << "# eprlab checkpoint v1\n";
  f << "kind " << (cp.model.kind == RewardKind::Ansatz ? "ansatz" : "mlp")
    << "\n";
  if (cp.model.kind == RewardKind::Mlp) {
    f << "arch";
    for (int s : cp.model.mlp.layer_sizes) f << ' ' << s;
    f << "\n";
  }
  if (!cp.config_hash.empty()) f << "config_hash " << cp.config_hash << "\n";
  if (cp.train) {
    f << "step " << cp.train->step << "\n";
    f << "temperature " << to_hex_float(cp.train->temperature) << "\n";
    f << "seed " << cp.train->seed << "\n";
    f << "next_index " << cp.train->next_index << "\n";
  }
  auto dump = [&f](const std::string& name, std::span<const double> vals) {
    f << "slice " << name << ' ' << vals.size() << "\n";
    for (double v : vals) f << to_hex_float(v) << "\n";
  };
  for (const auto& s : cp.model.params.layout) {
    dump(s.name, {cp.model.params.values.data() + s.offset,
                  static_cast<size_t>(s.length)});
  }
  if (cp.train) {
    dump("adam.m", cp.train->adam_m);
    dump("adam.v", cp.train->adam_v);
  }
  if (!f) throw InputError("failed writing checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open checkpoint: " + path);
  Checkpoint cp;
  bool have_kind = false;
  TrainExtras extras;
  bool have_train = false;
  std::vector<std::pair<std::string, std::vector<double>>> slices;

  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "kind") {
      std::string v;
      ss >> v;
      if (v == "ansatz") {
        cp.model.kind = RewardKind::Ansatz;
      } else if (v == "mlp") {
        cp.model.kind = RewardKind::Mlp;
      } else {
        throw InputError("checkpoint: unknown model kind '" + v + "'");
      }
      have_kind = true;
    } else if (key == "arch") {
      cp.model.mlp.layer_sizes.clear();
      int s;
      while (ss >> s) cp.model.mlp.layer_sizes.push_back(s);
    } else if (key == "config_hash") {
      ss >> cp.config_hash;
    } else if (key == "step") {
      ss >> extras.step;
      have_train = true;
    } else if (key == "temperature") {
      std::string v;
      ss >> v;
      extras.temperature = from_hex_float(v);
      have_train = true;
    } else if (key == "seed") {
      ss >> extras.seed;
      have_train = true;
    } else if (key == "next_index") {
      ss >> extras.next_index;
      have_train = true;
    } else if (key == "slice") {
      std::string name;
      size_t count = 0;
      ss >> name >> count;
      std::vector<double> vals;
      vals.reserve(count);
      for (size_t i = 0; i < count; ++i) {
        if (!std::getline(f, line)) {
          throw InputError("checkpoint: truncated slice '" + name + "'");
        }
        vals.push_back(from_hex_float(line));
      }
      slices.emplace_back(name, std::move(vals));
    } else {
      throw InputError("checkpoint: unknown key '" + key + "'");
    }
  }
  if (!have_kind) throw InputError("checkpoint: missing 'kind'");

  for (auto& [name, vals] : slices) {
    if (name == "adam.m") {
      extras.adam_m = std::move(vals);
      have_train = true;
    } else if (name == "adam.v") {
      extras.adam_v = std::move(vals);
      have_train = true;
    } else {
      const int off = static_cast<int>(cp.model.params.values.size());
      cp.model.params.layout.push_back(
          {name, off, static_cast<int>(vals.size())});
      cp.model.params.values.insert(cp.model.params.values.end(), vals.begin(),
                                    vals.end());
    }
  }
  if (have_train) cp.train = std::move(extras);
  return cp;
}

}  // namespace epr
