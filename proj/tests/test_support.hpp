#pragma once

#include <array>
#include <string>
#include <vector>

#include "epr/game.hpp"
#include "epr/scenario.hpp"

namespace epr::test {

/// Two-player EPR-shaped subgame with explicit payoffs in leaf order
/// (+,+),(+,-),(-,+),(-,-); payoffs[k] = {u_A, u_B}.
inline Game epr_game(const std::array<std::array<double, 2>, 4>& payoffs) {
  ScenarioConfig cfg;
  Game g = build_outcome_subgame(cfg, SettingPair{0, 0});
  for (int k = 0; k < 4; ++k) {
    g.nodes[3 + k].payoffs = {payoffs[k][0], payoffs[k][1]};
  }
  return g;
}

/// Worked elimination example: A-payoffs 4,1,2,3 and B-payoffs 4,2,1,3
/// by (x,y) = (+,+),(+,-),(-,+),(-,-).
inline Game worked_example_game() {
  return epr_game({{{4, 4}, {1, 2}, {2, 1}, {3, 3}}});
}

/// Single-decision game: one player, `n` leaves under the root.
inline Game single_decision_game(const std::vector<double>& payoffs) {
  Game g;
  g.player_count = 1;
  g.root = 0;
  Node root;
  root.id = 0;
  root.kind = NodeKind::Decision;
  root.owner = 0;
  root.infoset = 0;
  InformationSet is;
  is.id = 0;
  is.owner = 0;
  for (size_t i = 0; i < payoffs.size(); ++i) {
    const std::string label = "a" + std::to_string(i);
    root.children.emplace_back(label, static_cast<NodeId>(i + 1));
    is.action_labels.push_back(label);
  }
  is.member_nodes = {0};
  g.nodes.push_back(root);
  for (size_t i = 0; i < payoffs.size(); ++i) {
    Node leaf;
    leaf.id = static_cast<NodeId>(i + 1);
    leaf.kind = NodeKind::Leaf;
    leaf.payoffs = {payoffs[i]};
    g.nodes.push_back(leaf);
  }
  g.infosets = {is};
  return g;
}

}  // namespace epr::test
