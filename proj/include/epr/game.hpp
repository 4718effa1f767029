#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace epr {

using PlayerId = int;
using NodeId = int;
using InfosetId = int;

enum class NodeKind { Decision, Leaf };

struct Node {
  NodeId id = -1;
  NodeKind kind = NodeKind::Leaf;
  // Decision fields.
  PlayerId owner = -1;
  InfosetId infoset = -1;
  std::vector<std::pair<std::string, NodeId>> children;  // declared order
  // Leaf field: one payoff per player.
  std::vector<double> payoffs;
};

struct InformationSet {
  InfosetId id = -1;
  PlayerId owner = -1;
  std::vector<std::string> action_labels;  // declared order, never sorted
  std::vector<NodeId> member_nodes;
};

/// A finite extensive-form game with imperfect information. Plain data,
/// immutable by convention after construction; nodes and infosets are
/// indexed by their ids. Payoffs live at leaves; parameterized payoffs are
/// injected by rewriting leaf payoff vectors per evaluation, not closures.
struct Game {
  int player_count = 0;
  std::vector<Node> nodes;
  NodeId root = 0;
  std::vector<InformationSet> infosets;
};

/// Maps each of a player's infosets to a chosen action index (into the
/// infoset's declared action_labels).
struct PureStrategy {
  PlayerId owner = -1;
  std::map<InfosetId, int> choice;
};

/// Checks every structural invariant; returns one description per violation
/// (empty means well-formed). Never throws: violations are data.
std::vector<std::string> validate_game(const Game& game);

/// Leaf node ids in depth-first order. Requires a valid game.
std::vector<NodeId> game_leaves(const Game& game);

/// The subset of `remaining` reachable when strategy.owner plays `strategy`
/// everywhere and all other players are unconstrained. Requires valid game;
/// throws InputError on an unknown/non-leaf id in `remaining`.
std::vector<NodeId> consistent_outcomes(const Game& game,
                                        const PureStrategy& strategy,
                                        const std::vector<NodeId>& remaining);

/// Full Cartesian product of the player's per-infoset action choices, in
/// deterministic lexicographic order (infosets by id, actions as declared).
/// A player with no infoset gets the single empty strategy.
std::vector<PureStrategy> enumerate_pure_strategies(const Game& game,
                                                    PlayerId player);

}  // namespace epr
