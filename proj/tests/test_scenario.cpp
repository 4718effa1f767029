#include <doctest.h>

#include <cmath>
#include <numbers>

#include "epr/metrics.hpp"
#include "epr/scenario.hpp"
#include "epr/util.hpp"

using namespace epr;

TEST_SUITE("scenario") {

TEST_CASE("empty document yields the documented defaults") {
  for (const std::string& doc : {std::string{}, std::string{"{}"},
                                 std::string{"  \n\t"}}) {
    const ScenarioConfig cfg = parse_scenario(doc);
    CHECK(cfg.alice_angles_deg == std::array<double, 2>{0.0, 90.0});
    CHECK(cfg.bob_angles_deg == std::array<double, 2>{45.0, 135.0});
    CHECK(cfg.state_is_singlet);
    CHECK(cfg.reward_model == RewardKind::Ansatz);
    CHECK(cfg.train.batch_size == 1024);
    CHECK(cfg.train.steps == 2000);
    CHECK(cfg.run.runs == 1000000);
    CHECK(cfg.warnings.empty());
  }
  // The defaults realize the 45-degree offset: the Born target's CHSH
  // reaches 2*sqrt(2).
  const ScenarioConfig cfg = parse_scenario("{}");
  const auto target = target_histogram(cfg.state, cfg.angles());
  const auto chsh = chsh_value(target.cells);
  CHECK(chsh.abs_s_max ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("degenerate equal angles parse with a warning") {
  const ScenarioConfig cfg = parse_scenario(R"({"alice_angles": [0, 0]})");
  CHECK(cfg.alice_angles_deg == std::array<double, 2>{0.0, 0.0});
  REQUIRE(!cfg.warnings.empty());
  CHECK(cfg.warnings.front().find("degenerate") != std::string::npos);
}

TEST_CASE("non-physical density matrices are rejected naming the field") {
  const std::string doc = R"({"state": {"re": [
    [0.5, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}})";
  try {
    parse_scenario(doc);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("state") != std::string::npos);
    CHECK(std::string(e.what()).find("trace") != std::string::npos);
  }
}

TEST_CASE("malformed documents fail with useful paths") {
  CHECK_THROWS_AS(parse_scenario("{"), InputError);
  CHECK_THROWS_AS(parse_scenario("[1,2,3]"), InputError);
  try {
    parse_scenario(R"({"alice_angels": [0, 90]})");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("alice_angels") != std::string::npos);
  }
  try {
    parse_scenario(R"({"train": {"batch_size": 0}})");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("batch_size") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario(R"({"run": {"runs": 0}})"), InputError);
  CHECK_THROWS_AS(parse_scenario(R"({"alice_angles": [0]})"), InputError);
}

TEST_CASE("the sphere hidden-variable descriptor is reserved") {
  try {
    parse_scenario(R"({"hidden_var": {"kind": "sphere"}})");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("sphere") != std::string::npos);
    CHECK(std::string(e.what()).find("reserved") != std::string::npos);
  }
}

TEST_CASE("serialize/parse round-trips configurations exactly") {
  SUBCASE("defaults") {
    const ScenarioConfig cfg = parse_scenario("{}");
    CHECK(parse_scenario(serialize_scenario(cfg)) == cfg);
  }
  SUBCASE("customized") {
    const std::string doc = R"({
      "alice_angles": [10.5, 97.25],
      "bob_angles": [53.125, 140.0],
      "reward_model": "mlp",
      "mlp": {"hidden_sizes": [4, 4, 4]},
      "hidden_var": {"kind": "uniform_angle", "low": 5, "high": 350},
      "train": {"learning_rate": 0.0125, "batch_size": 64, "steps": 17,
                "temperature": {"start": 2.0, "end": 0.125,
                                 "shape": "linear"},
                "seed": 77, "optimizer": "sgd", "checkpoint_interval": 5},
      "run": {"runs": 12345, "seed": 999},
      "universe_player": true
    })";
    const ScenarioConfig cfg = parse_scenario(doc);
    CHECK(cfg.reward_model == RewardKind::Mlp);
    CHECK(cfg.mlp_hidden_sizes == std::vector<int>{4, 4, 4});
    CHECK(cfg.train.optimizer == OptimizerKind::Sgd);
    CHECK(cfg.universe_player);
    CHECK(parse_scenario(serialize_scenario(cfg)) == cfg);
  }
  SUBCASE("explicit density matrix") {
    const std::string doc = R"({"state": {"re": [
      [0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]}})";
    const ScenarioConfig cfg = parse_scenario(doc);  // Phi+ Bell state
    CHECK(!cfg.state_is_singlet);
    CHECK(parse_scenario(serialize_scenario(cfg)) == cfg);
  }
}

TEST_CASE("scenario hash is stable and distinguishes configs") {
  const ScenarioConfig a = parse_scenario("{}");
  const ScenarioConfig b = parse_scenario(R"({"run": {"seed": 5}})");
  CHECK(scenario_hash(a) == scenario_hash(parse_scenario("{}")));
  CHECK(scenario_hash(a) != scenario_hash(b));
}

TEST_CASE("learning rate default depends on the model kind") {
  ScenarioConfig cfg = parse_scenario("{}");
  CHECK(cfg.learning_rate() == 0.05);
  cfg.reward_model = RewardKind::Mlp;
  CHECK(cfg.learning_rate() == 0.003);
  const ScenarioConfig with_lr =
      parse_scenario(R"({"train": {"learning_rate": 0.5}})");
  CHECK(with_lr.learning_rate() == 0.5);
}

TEST_CASE("outcome subgame has the documented fixed shape") {
  const ScenarioConfig cfg = parse_scenario("{}");
  for (const SettingPair& pr : setting_pairs()) {
    const Game g = build_outcome_subgame(cfg, pr);
    CHECK(validate_game(g).empty());
    int decisions = 0, leaves = 0;
    for (const Node& n : g.nodes) {
      (n.kind == NodeKind::Decision ? decisions : leaves)++;
    }
    CHECK(decisions == 3);
    CHECK(leaves == 4);
    CHECK(g.infosets.size() == 2);
    CHECK(g.infosets[1].member_nodes.size() == 2);  // ParticleB's infoset
  }
}

TEST_CASE("the four subgames are structurally identical") {
  const ScenarioConfig cfg = parse_scenario("{}");
  const Game base = build_outcome_subgame(cfg, {0, 0});
  for (const SettingPair& pr : setting_pairs()) {
    const Game g = build_outcome_subgame(cfg, pr);
    REQUIRE(g.nodes.size() == base.nodes.size());
    for (size_t i = 0; i < g.nodes.size(); ++i) {
      CHECK(g.nodes[i].kind == base.nodes[i].kind);
      CHECK(g.nodes[i].owner == base.nodes[i].owner);
      CHECK(g.nodes[i].children == base.nodes[i].children);
    }
  }
}

TEST_CASE("setting pairs enumerate lexicographically") {
  const auto pairs = setting_pairs();
  REQUIRE(pairs.size() == 4);
  CHECK((pairs[0].a == 0 && pairs[0].b == 0));
  CHECK((pairs[1].a == 0 && pairs[1].b == 1));
  CHECK((pairs[2].a == 1 && pairs[2].b == 0));
  CHECK((pairs[3].a == 1 && pairs[3].b == 1));
}

TEST_CASE("hidden samples honor the configured range") {
  const ScenarioConfig cfg = parse_scenario(
      R"({"hidden_var": {"kind": "uniform_angle", "low": 90, "high": 180}})");
  for (int i = 0; i < 200; ++i) {
    const double l = cfg.hidden_sample(3, i).lambda;
    CHECK(l >= std::numbers::pi / 2.0);
    CHECK(l < std::numbers::pi);
  }
}

}  // TEST_SUITE
