#include "epr/game.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "epr/util.hpp"

namespace epr {

namespace {

std::string node_str(NodeId id) { return "node " + std::to_string(id); }

bool in_range(NodeId id, const Game& g) {
  return id >= 0 && id < static_cast<NodeId>(g.nodes.size());
}

}  // namespace

std::vector<std::string> validate_game(const Game& game) {
  std::vector<std::string> out;
  const auto n = static_cast<NodeId>(game.nodes.size());

  if (game.player_count <= 0) out.push_back("player_count must be positive");
  if (!in_range(game.root, game)) {
    out.push_back("root id out of range");
    return out;
  }

  for (NodeId i = 0; i < n; ++i) {
    const Node& nd = game.nodes[i];
    if (nd.id != i) {
      out.push_back(node_str(i) + ": id field disagrees with table index");
    }
    if (nd.kind == NodeKind::Decision) {
      if (nd.children.empty()) {
        out.push_back(node_str(i) + ": decision node with no child");
      }
      if (nd.owner < 0 || nd.owner >= game.player_count) {
        out.push_back(node_str(i) + ": owner out of range");
      }
      if (nd.infoset < 0 ||
          nd.infoset >= static_cast<InfosetId>(game.infosets.size())) {
        out.push_back(node_str(i) + ": infoset id out of range");
      }
      for (const auto& [label, child] : nd.children) {
        if (!in_range(child, game)) {
          out.push_back(node_str(i) + ": child id " + std::to_string(child) +
                        " out of range");
        }
      }
    } else {
      if (static_cast<int>(nd.payoffs.size()) != game.player_count) {
        out.push_back(node_str(i) + ": leaf has " +
                      std::to_string(nd.payoffs.size()) + " payoffs, expected " +
                      std::to_string(game.player_count));
      }
      for (double v : nd.payoffs) {
        if (!std::isfinite(v)) {
          out.push_back(node_str(i) + ": non-finite payoff");
          break;
        }
      }
    }
  }

  // Tree structure: every non-root node has exactly one parent, no cycles,
  // everything reachable from root.
  std::vector<int> parents(n, 0);
  for (NodeId i = 0; i < n; ++i) {
    const Node& nd = game.nodes[i];
    if (nd.kind != NodeKind::Decision) continue;
    for (const auto& [label, child] : nd.children) {
      if (in_range(child, game)) parents[child]++;
    }
  }
  if (parents[game.root] != 0) {
    out.push_back("root has a parent edge");
  }
  for (NodeId i = 0; i < n; ++i) {
    if (i == game.root) continue;
    if (parents[i] == 0) out.push_back(node_str(i) + ": unreachable from root");
    if (parents[i] > 1) out.push_back(node_str(i) + ": multiple parents");
  }
  // Cycle check via iterative DFS with a visit cap.
  {
    std::vector<char> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<std::pair<NodeId, size_t>> stack{{game.root, 0}};
    state[game.root] = 1;
    while (!stack.empty()) {
      auto& [id, idx] = stack.back();
      const Node& nd = game.nodes[id];
      if (nd.kind != NodeKind::Decision || idx >= nd.children.size()) {
        state[id] = 2;
        stack.pop_back();
        continue;
      }
      const NodeId child = nd.children[idx++].second;
      if (!in_range(child, game)) continue;
      if (state[child] == 1) {
        out.push_back("cycle through " + node_str(child));
        state[id] = 2;
        stack.pop_back();
      } else if (state[child] == 0) {
        state[child] = 1;
        stack.push_back({child, 0});
      }
    }
  }

  // Information sets.
  std::vector<int> infoset_of(n, -1);
  for (InfosetId s = 0; s < static_cast<InfosetId>(game.infosets.size()); ++s) {
    const InformationSet& is = game.infosets[s];
    if (is.id != s) {
      out.push_back("infoset " + std::to_string(s) +
                    ": id field disagrees with table index");
    }
    if (is.action_labels.empty()) {
      out.push_back("infoset " + std::to_string(s) + ": no actions");
    }
    for (NodeId m : is.member_nodes) {
      if (!in_range(m, game)) {
        out.push_back("infoset " + std::to_string(s) + ": member " +
                      std::to_string(m) + " out of range");
        continue;
      }
      const Node& nd = game.nodes[m];
      if (nd.kind != NodeKind::Decision) {
        out.push_back("infoset " + std::to_string(s) + ": member " +
                      node_str(m) + " is not a decision node");
        continue;
      }
      if (nd.owner != is.owner) {
        out.push_back("infoset " + std::to_string(s) + ": member " +
                      node_str(m) + " owned by a different player");
      }
      std::vector<std::string> labels;
      for (const auto& [label, child] : nd.children) labels.push_back(label);
      if (labels != is.action_labels) {
        out.push_back("infoset " + std::to_string(s) + ": member " +
                      node_str(m) + " has mismatched action labels");
      }
      if (infoset_of[m] != -1) {
        out.push_back(node_str(m) + ": belongs to two information sets");
      }
      infoset_of[m] = s;
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    const Node& nd = game.nodes[i];
    if (nd.kind != NodeKind::Decision) continue;
    if (infoset_of[i] == -1) {
      out.push_back(node_str(i) + ": decision node in no information set");
    } else if (nd.infoset != infoset_of[i]) {
      out.push_back(node_str(i) + ": infoset field disagrees with membership");
    }
  }
  return out;
}

std::vector<NodeId> game_leaves(const Game& game) {
  std::vector<NodeId> leaves;
  std::vector<NodeId> stack{game.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const Node& nd = game.nodes[id];
    if (nd.kind == NodeKind::Leaf) {
      leaves.push_back(id);
    } else {
      // Push in reverse so children are visited in declared order.
      for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) {
        stack.push_back(it->second);
      }
    }
  }
  return leaves;
}

std::vector<NodeId> consistent_outcomes(const Game& game,
                                        const PureStrategy& strategy,
                                        const std::vector<NodeId>& remaining) {
  // Parent edges let us walk root paths without recursion.
  std::vector<std::pair<NodeId, int>> parent(game.nodes.size(), {-1, -1});
  for (const Node& nd : game.nodes) {
    if (nd.kind != NodeKind::Decision) continue;
    for (int c = 0; c < static_cast<int>(nd.children.size()); ++c) {
      parent[nd.children[c].second] = {nd.id, c};
    }
  }

  std::vector<NodeId> out;
  for (NodeId leaf : remaining) {
    if (leaf < 0 || leaf >= static_cast<NodeId>(game.nodes.size()) ||
        game.nodes[leaf].kind != NodeKind::Leaf) {
      throw InputError("consistent_outcomes: id " + std::to_string(leaf) +
                       " is not a leaf of the game");
    }
    bool ok = true;
    NodeId cur = leaf;
    while (cur != game.root) {
      const auto [p, edge] = parent[cur];
      const Node& dec = game.nodes[p];
      if (dec.owner == strategy.owner) {
        const auto it = strategy.choice.find(dec.infoset);
        if (it == strategy.choice.end() || it->second != edge) {
          ok = false;
          break;
        }
      }
      cur = p;
    }
    if (ok) out.push_back(leaf);
  }
  return out;
}

std::vector<PureStrategy> enumerate_pure_strategies(const Game& game,
                                                    PlayerId player) {
  std::vector<InfosetId> owned;
  for (const InformationSet& is : game.infosets) {
    if (is.owner == player) owned.push_back(is.id);
  }
  std::sort(owned.begin(), owned.end());

  std::vector<PureStrategy> out;
  std::vector<int> pick(owned.size(), 0);
  while (true) {
    PureStrategy s;
    s.owner = player;
    for (size_t i = 0; i < owned.size(); ++i) s.choice[owned[i]] = pick[i];
    out.push_back(std::move(s));
    // Lexicographic increment: last infoset varies fastest.
    int i = static_cast<int>(owned.size()) - 1;
    for (; i >= 0; --i) {
      const auto acts =
          static_cast<int>(game.infosets[owned[i]].action_labels.size());
      if (++pick[i] < acts) break;
      pick[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

}  // namespace epr
