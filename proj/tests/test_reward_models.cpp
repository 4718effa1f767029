#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "epr/reward_models.hpp"
#include "epr/scenario.hpp"
#include "epr/util.hpp"

using namespace epr;

namespace {

const MeasurementAngles& default_angles() {
  static const MeasurementAngles a = [] {
    ScenarioConfig cfg;
    return cfg.angles();
  }();
  return a;
}

// Independent reimplementation of the ansatz used as a dual oracle.
std::array<double, 2> ansatz_reference(double lambda, double delta,
                                       const MeasurementAngles& ang,
                                       SettingPair pr, int x, int y) {
  const double dhat = ang.alice[pr.a] - (ang.alice[pr.b] + delta);
  const double triangle = 2.0 / std::numbers::pi * std::asin(std::cos(lambda));
  const double s = std::sin(lambda) >= 0 ? 1.0 : -1.0;
  return {x * std::sin(lambda), y * s * (triangle - std::cos(dhat))};
}

}  // namespace

TEST_SUITE("reward_models") {

TEST_CASE("param slices partition and resolve by name") {
  RewardModel m = RewardModel::make_mlp(MlpLayout{{8, 3, 2}}, 1);
  int covered = 0;
  for (const auto& s : m.params.layout) covered += s.length;
  CHECK(covered == m.params.size());
  CHECK(m.params.slice("layer0.weights").size() == 24);
  CHECK(m.params.slice("layer1.bias").size() == 2);
  CHECK_THROWS_AS(m.params.slice("nonesuch"), InputError);
}

TEST_CASE("missing offset slice is a configuration error") {
  ParamVector empty;
  CHECK_THROWS_AS(
      ansatz_payoffs({0.5}, default_angles(), {0, 0}, 1, 1, empty),
      InputError);
}

TEST_CASE("ansatz payoffs: hand-checked values") {
  const auto& ang = default_angles();
  const double quarter = std::numbers::pi / 4.0;
  SUBCASE("ParticleA reward is x sin(lambda)") {
    RewardModel m = RewardModel::make_ansatz(0.3);
    const auto u =
        ansatz_payoffs({std::numbers::pi / 2.0}, ang, {0, 0}, 1, 1, m.params);
    CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-15));
    const auto v =
        ansatz_payoffs({std::numbers::pi / 2.0}, ang, {0, 0}, -1, 1, m.params);
    CHECK(v[0] == doctest::Approx(-1.0).epsilon(1e-15));
  }
  SUBCASE("ParticleB threshold at the ramp midpoint") {
    // lambda = pi/2: triangle = 0 and side = +1, so u_B = -y cos(dhat);
    // pair (0,0) at delta = pi/4 gives dhat = -pi/4.
    RewardModel m = RewardModel::make_ansatz(quarter);
    const auto u =
        ansatz_payoffs({std::numbers::pi / 2.0}, ang, {0, 0}, 1, 1, m.params);
    CHECK(u[1] == doctest::Approx(-std::cos(quarter)).epsilon(1e-13));
  }
  SUBCASE("dual implementation agreement on a grid") {
    RewardModel m = RewardModel::make_ansatz(0.9);
    for (int i = 0; i < 64; ++i) {
      const double lambda = sample_hidden(3, i).lambda;
      const SettingPair pr{i % 2, (i / 2) % 2};
      const int x = (i % 4) < 2 ? 1 : -1;
      const int y = (i % 8) < 4 ? 1 : -1;
      const auto got = ansatz_payoffs({lambda}, ang, pr, x, y, m.params);
      const auto want = ansatz_reference(lambda, 0.9, ang, pr, x, y);
      CHECK(got[0] == doctest::Approx(want[0]).epsilon(1e-14));
      CHECK(got[1] == doctest::Approx(want[1]).epsilon(1e-14));
    }
  }
}

TEST_CASE("ansatz payoffs are 2*pi periodic in lambda and delta") {
  const auto& ang = default_angles();
  const double two_pi = 2.0 * std::numbers::pi;
  RewardModel m = RewardModel::make_ansatz(1.1);
  RewardModel shifted = RewardModel::make_ansatz(1.1 + two_pi);
  for (int i = 0; i < 32; ++i) {
    const double lambda = sample_hidden(4, i).lambda;
    const SettingPair pr{i % 2, (i / 2) % 2};
    const auto base = ansatz_payoffs({lambda}, ang, pr, 1, -1, m.params);
    const auto lam_shift =
        ansatz_payoffs({lambda + two_pi}, ang, pr, 1, -1, m.params);
    const auto del_shift =
        ansatz_payoffs({lambda}, ang, pr, 1, -1, shifted.params);
    for (int p = 0; p < 2; ++p) {
      CHECK(base[p] == doctest::Approx(lam_shift[p]).epsilon(1e-12));
      CHECK(base[p] == doctest::Approx(del_shift[p]).epsilon(1e-12));
    }
  }
}

TEST_CASE("ansatz evaluation is bit-deterministic") {
  const auto& ang = default_angles();
  RewardModel m = RewardModel::make_ansatz(0.4321);
  const auto a = ansatz_payoffs({2.718}, ang, {1, 0}, -1, 1, m.params);
  const auto b = ansatz_payoffs({2.718}, ang, {1, 0}, -1, 1, m.params);
  CHECK(a[0] == b[0]);
  CHECK(a[1] == b[1]);
}

TEST_CASE("ansatz gradient: closed form and finite differences") {
  const auto& ang = default_angles();
  RewardModel m = RewardModel::make_ansatz(0.37);
  for (int i = 0; i < 24; ++i) {
    const double lambda = sample_hidden(5, i).lambda;
    const SettingPair pr{i % 2, (i / 2) % 2};
    const int x = (i % 4) < 2 ? 1 : -1;
    const int y = i % 2 == 0 ? 1 : -1;
    const auto g = payoff_gradient(m, {lambda}, ang, pr, x, y);
    // ParticleA's reward has no parameter dependence at all.
    CHECK(g[0] == 0.0);
    const double dhat = ang.alice[pr.a] - (ang.alice[pr.b] + 0.37);
    const double side = std::sin(lambda) >= 0 ? 1.0 : -1.0;
    CHECK(g[1] == doctest::Approx(-y * side * std::sin(dhat)).epsilon(1e-13));
    const double h = 1e-6;
    m.params.values[0] = 0.37 + h;
    const auto up = model_payoffs(m, {lambda}, ang, pr, x, y);
    m.params.values[0] = 0.37 - h;
    const auto dn = model_payoffs(m, {lambda}, ang, pr, x, y);
    m.params.values[0] = 0.37;
    CHECK(g[1] == doctest::Approx((up[1] - dn[1]) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("mlp with all-zero parameters returns zero payoffs") {
  RewardModel m = RewardModel::make_mlp(MlpLayout{{8, 16, 16, 2}}, 9);
  std::fill(m.params.values.begin(), m.params.values.end(), 0.0);
  const auto u = model_payoffs(m, {1.234}, default_angles(), {1, 1}, -1, 1);
  CHECK(u[0] == 0.0);
  CHECK(u[1] == 0.0);
}

TEST_CASE("mlp with only output bias returns the bias for any input") {
  RewardModel m = RewardModel::make_mlp(MlpLayout{{8, 16, 16, 2}}, 9);
  std::fill(m.params.values.begin(), m.params.values.end(), 0.0);
  auto bias = m.params.slice("layer2.bias");
  bias[0] = 1.5;
  bias[1] = -0.5;
  for (int i = 0; i < 8; ++i) {
    const auto u = model_payoffs(m, sample_hidden(6, i), default_angles(),
                                 {i % 2, (i / 2) % 2}, 1, -1);
    CHECK(u[0] == 1.5);
    CHECK(u[1] == -0.5);
  }
}

TEST_CASE("mlp forward pass matches an independent reimplementation") {
  const MlpLayout layout{{8, 3, 2}};
  RewardModel m = RewardModel::make_mlp(layout, 42);
  const double lambda = 0.77;
  const SettingPair pr{1, 0};
  const int x = -1, y = 1;
  const auto got = model_payoffs(m, {lambda}, default_angles(), pr, x, y);

  const double f[8] = {std::cos(lambda), std::sin(lambda), 0, 1, 1, 0,
                       static_cast<double>(x), static_cast<double>(y)};
  const auto W0 = m.params.slice("layer0.weights");
  const auto b0 = m.params.slice("layer0.bias");
  const auto W1 = m.params.slice("layer1.weights");
  const auto b1 = m.params.slice("layer1.bias");
  double hidden[3];
  for (int j = 0; j < 3; ++j) {
    double s = b0[j];
    for (int i = 0; i < 8; ++i) s += W0[j * 8 + i] * f[i];
    hidden[j] = std::tanh(s);
  }
  for (int p = 0; p < 2; ++p) {
    double s = b1[p];
    for (int j = 0; j < 3; ++j) s += W1[p * 3 + j] * hidden[j];
    CHECK(got[p] == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("mlp gradient matches finite differences") {
  RewardModel m = RewardModel::make_mlp(MlpLayout{{8, 5, 2}}, 7);
  const auto& ang = default_angles();
  const int n = m.params.size();
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    const HiddenVariable lam = sample_hidden(8, i);
    const SettingPair pr{i % 2, (i / 2) % 2};
    const auto g = payoff_gradient(m, lam, ang, pr, 1, -1);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-6;
      const double saved = m.params.values[j];
      m.params.values[j] = saved + h;
      const auto up = model_payoffs(m, lam, ang, pr, 1, -1);
      m.params.values[j] = saved - h;
      const auto dn = model_payoffs(m, lam, ang, pr, 1, -1);
      m.params.values[j] = saved;
      for (int p = 0; p < 2; ++p) {
        const double fd = (up[p] - dn[p]) / (2 * h);
        worst = std::max(worst, std::abs(g[p * n + j] - fd) /
                                    std::max({std::abs(g[p * n + j]),
                                              std::abs(fd), 1e-6}));
      }
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("mlp rejects shape mismatches") {
  RewardModel m = RewardModel::make_mlp(MlpLayout{{8, 4, 2}}, 7);
  m.params.values.pop_back();
  CHECK_THROWS_AS(
      mlp_payoffs({0.1}, default_angles(), {0, 0}, 1, 1, m.mlp, m.params),
      InputError);
  MlpLayout bad{{6, 4, 2}};
  RewardModel m2 = RewardModel::make_mlp(bad, 7);
  CHECK_THROWS_AS(
      mlp_payoffs({0.1}, default_angles(), {0, 0}, 1, 1, bad, m2.params),
      InputError);
}

TEST_CASE("hidden-variable stream is deterministic and in range") {
  for (int i = 0; i < 1000; ++i) {
    const HiddenVariable a = sample_hidden(12345, i);
    const HiddenVariable b = sample_hidden(12345, i);
    CHECK(a.lambda == b.lambda);
    CHECK(a.lambda >= 0.0);
    CHECK(a.lambda < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("different seeds give different sequences") {
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    any_diff =
        any_diff || sample_hidden(1, i).lambda != sample_hidden(2, i).lambda;
  }
  CHECK(any_diff);
}

TEST_CASE("hidden-variable stream is unbiased on the circle") {
  const int n = 100000;
  double mean_cos = 0.0, mean_sin = 0.0;
  for (int i = 0; i < n; ++i) {
    const double l = sample_hidden(5, i).lambda;
    mean_cos += std::cos(l);
    mean_sin += std::sin(l);
  }
  mean_cos /= n;
  mean_sin /= n;
  const double bound = 3.0 / std::sqrt(static_cast<double>(n)) / std::sqrt(2.0);
  CHECK(std::abs(mean_cos) < bound);
  CHECK(std::abs(mean_sin) < bound);
}

TEST_CASE("checkpoint files round-trip bit-exactly") {
  namespace fs = std::filesystem;
  const fs::path path =
      fs::temp_directory_path() / "eprlab_test_checkpoint.txt";

  Checkpoint cp;
  cp.model = RewardModel::make_mlp(MlpLayout{{8, 4, 2}}, 11);
  cp.model.params.values[3] = 0x1.fedcba9876543p-7;  // awkward mantissa
  cp.config_hash = "0xdeadbeef";
  TrainExtras ex;
  ex.step = 137;
  ex.temperature = 0.054321;
  ex.seed = 99;
  ex.next_index = 137 * 1024;
  ex.adam_m.assign(cp.model.params.size(), 1e-9);
  ex.adam_v.assign(cp.model.params.size(), 3e-17);
  ex.adam_m[1] = -0.25;
  cp.train = ex;

  write_checkpoint(path.string(), cp);
  const Checkpoint back = read_checkpoint(path.string());
  fs::remove(path);

  CHECK(back.model.kind == RewardKind::Mlp);
  CHECK(back.model.mlp.layer_sizes == cp.model.mlp.layer_sizes);
  REQUIRE(back.model.params.values.size() == cp.model.params.values.size());
  for (size_t i = 0; i < cp.model.params.values.size(); ++i) {
    CHECK(back.model.params.values[i] == cp.model.params.values[i]);
  }
  REQUIRE(back.model.params.layout.size() == cp.model.params.layout.size());
  CHECK(back.config_hash == "0xdeadbeef");
  REQUIRE(back.train.has_value());
  CHECK(back.train->step == 137);
  CHECK(back.train->temperature == 0.054321);
  CHECK(back.train->next_index == ex.next_index);
  CHECK(back.train->adam_m == ex.adam_m);
  CHECK(back.train->adam_v == ex.adam_v);
}

TEST_CASE("corrupt checkpoints are rejected with a clear error") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "eprlab_bad_checkpoint.txt";
  {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    std::fputs("kind ansatz\nslice offset 2\n0x1p+0\n", f);  // truncated
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_checkpoint(path.string()), InputError);
  fs::remove(path);
  CHECK_THROWS_AS(read_checkpoint("/nonexistent/prairie.txt"), InputError);
}

}  // TEST_SUITE
