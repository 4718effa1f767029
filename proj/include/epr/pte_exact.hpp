#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epr/game.hpp"

namespace epr {

struct EliminationRound {
  std::vector<double> thresholds;   // per-player maximin before the cut
  std::vector<NodeId> eliminated;   // leaves removed by this round
};

struct EliminationTrace {
  std::vector<EliminationRound> rounds;  // last round eliminates nothing
  std::vector<NodeId> surviving;
};

enum class PteStatus {
  Unique,         // exactly one surviving leaf
  NonGeneric,     // fixpoint with >1 survivor (payoff ties)
  NoEquilibrium,  // every leaf fell below some player's threshold
};

struct PteResult {
  PteStatus status = PteStatus::NoEquilibrium;
  NodeId leaf = -1;  // valid when status == Unique
  EliminationTrace trace;
};

/// Best payoff `player` can guarantee across the remaining possible worlds:
/// max over the player's pure strategies of the min payoff over outcomes in
/// `remaining` consistent with that strategy. Strategies with no consistent
/// remaining outcome contribute -infinity. Throws InputError if remaining is
/// empty.
double maximin(const Game& game, PlayerId player,
               const std::vector<NodeId>& remaining);

/// One simultaneous elimination round: computes every player's maximin over
/// `remaining`, then keeps exactly the leaves weakly above all thresholds
/// (strict inequality eliminates, so threshold-achieving outcomes survive).
/// May return an empty set; the caller reports non-existence.
std::pair<std::vector<NodeId>, std::vector<double>> eliminate_round(
    const Game& game, const std::vector<NodeId>& remaining);

/// Iterates eliminate_round to a fixpoint from the full leaf set.
PteResult pte_solve(const Game& game);

/// Precomputed structure for repeated solves of one game shape with varying
/// leaf payoffs (the per-(lambda, setting-pair) hot path). Consistent-outcome
/// sets are memoized as bitmasks per (player, strategy); thresholds are
/// recomputed only over survivors. Requires a valid game with <= 64 leaves.
class SolverContext {
 public:
  explicit SolverContext(const Game& game);

  int leaf_count() const { return leaf_count_; }
  int player_count() const { return player_count_; }
  const std::vector<NodeId>& leaves() const { return leaves_; }
  int strategy_count(PlayerId p) const {
    return static_cast<int>(strategy_masks_[p].size());
  }
  std::uint64_t strategy_mask(PlayerId p, int strategy) const {
    return strategy_masks_[p][strategy];
  }

  /// payoffs[k * player_count + p] is player p's payoff at leaf index k
  /// (indices into leaves()). Allocation-free.
  struct FastResult {
    PteStatus status;
    int leaf_index;           // valid when Unique
    std::uint64_t survivors;  // bitmask at the fixpoint
  };
  FastResult solve(std::span<const double> payoffs) const;

  /// Same elimination with a full trace (leaf indices, not node ids).
  PteResult solve_traced(std::span<const double> payoffs) const;

  double maximin(PlayerId player, std::uint64_t remaining,
                 std::span<const double> payoffs) const;

 private:
  int leaf_count_ = 0;
  int player_count_ = 0;
  std::vector<NodeId> leaves_;
  // strategy_masks_[p][s]: bitmask over leaf indices consistent with the
  // s-th pure strategy of player p (enumeration order).
  std::vector<std::vector<std::uint64_t>> strategy_masks_;
};

/// Uses the payoffs stored at the game's leaves.
PteResult pte_solve(const SolverContext& ctx, const Game& game);

}  // namespace epr
