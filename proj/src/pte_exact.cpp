#include "epr/pte_exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "epr/util.hpp"

namespace epr {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double maximin(const Game& game, PlayerId player,
               const std::vector<NodeId>& remaining) {
  if (remaining.empty()) {
    throw InputError("maximin: remaining outcome set is empty");
  }
  double best = kNegInf;
  for (const PureStrategy& s : enumerate_pure_strategies(game, player)) {
    const auto consistent = consistent_outcomes(game, s, remaining);
    double worst = kNegInf;
    if (!consistent.empty()) {
      worst = std::numeric_limits<double>::infinity();
      for (NodeId z : consistent) {
        worst = std::min(worst, game.nodes[z].payoffs[player]);
      }
    }
    best = std::max(best, worst);
  }
  return best;
}

std::pair<std::vector<NodeId>, std::vector<double>> eliminate_round(
    const Game& game, const std::vector<NodeId>& remaining) {
  std::vector<double> thresholds(game.player_count);
  for (PlayerId p = 0; p < game.player_count; ++p) {
    thresholds[p] = maximin(game, p, remaining);
  }
  std::vector<NodeId> kept;
  for (NodeId z : remaining) {
    bool keep = true;
    for (PlayerId p = 0; p < game.player_count; ++p) {
      if (game.nodes[z].payoffs[p] < thresholds[p]) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(z);
  }
  return {kept, thresholds};
}

PteResult pte_solve(const Game& game) {
  PteResult res;
  std::vector<NodeId> remaining = game_leaves(game);
  const size_t max_rounds = remaining.size() + 1;
  for (size_t r = 0; r < max_rounds; ++r) {
    auto [kept, thresholds] = eliminate_round(game, remaining);
    EliminationRound round;
    round.thresholds = thresholds;
    for (NodeId z : remaining) {
      if (std::find(kept.begin(), kept.end(), z) == kept.end()) {
        round.eliminated.push_back(z);
      }
    }
    const bool fixpoint = round.eliminated.empty();
    res.trace.rounds.push_back(std::move(round));
    remaining = std::move(kept);
    if (remaining.empty()) {
      res.status = PteStatus::NoEquilibrium;
      res.trace.surviving.clear();
      return res;
    }
    if (fixpoint) break;
  }
  res.trace.surviving = remaining;
  if (remaining.size() == 1) {
    res.status = PteStatus::Unique;
    res.leaf = remaining[0];
  } else {
    res.status = PteStatus::NonGeneric;
  }
  return res;
}

SolverContext::SolverContext(const Game& game) {
  leaves_ = game_leaves(game);
  leaf_count_ = static_cast<int>(leaves_.size());
  player_count_ = game.player_count;
  if (leaf_count_ > 64) {
    throw InputError("SolverContext supports at most 64 leaves, got " +
                     std::to_string(leaf_count_));
  }
  strategy_masks_.resize(player_count_);
  for (PlayerId p = 0; p < player_count_; ++p) {
    for (const PureStrategy& s : enumerate_pure_strategies(game, p)) {
      const auto consistent = consistent_outcomes(game, s, leaves_);
      std::uint64_t mask = 0;
      for (NodeId z : consistent) {
        const auto it = std::find(leaves_.begin(), leaves_.end(), z);
        mask |= 1ULL << (it - leaves_.begin());
      }
      strategy_masks_[p].push_back(mask);
    }
  }
}

double SolverContext::maximin(PlayerId player, std::uint64_t remaining,
                              std::span<const double> payoffs) const {
  double best = kNegInf;
  for (std::uint64_t smask : strategy_masks_[player]) {
    std::uint64_t live = smask & remaining;
    if (live == 0) continue;  // empty consistent set: -inf, never selected
    double worst = std::numeric_limits<double>::infinity();
    while (live) {
      const int k = std::countr_zero(live);
      live &= live - 1;
      worst = std::min(worst, payoffs[k * player_count_ + player]);
    }
    best = std::max(best, worst);
  }
  return best;
}

SolverContext::FastResult SolverContext::solve(
    std::span<const double> payoffs) const {
  std::uint64_t remaining = (leaf_count_ == 64)
                                ? ~0ULL
                                : ((1ULL << leaf_count_) - 1);
  for (int r = 0; r <= leaf_count_; ++r) {
    std::uint64_t kept = remaining;
    for (PlayerId p = 0; p < player_count_; ++p) {
      const double m = maximin(p, remaining, payoffs);
      std::uint64_t live = remaining;
      while (live) {
        const int k = std::countr_zero(live);
        live &= live - 1;
        if (payoffs[k * player_count_ + p] < m) kept &= ~(1ULL << k);
      }
    }
    if (kept == 0) return {PteStatus::NoEquilibrium, -1, 0};
    if (kept == remaining) break;
    remaining = kept;
  }
  if (std::popcount(remaining) == 1) {
    return {PteStatus::Unique, std::countr_zero(remaining), remaining};
  }
  return {PteStatus::NonGeneric, -1, remaining};
}

PteResult SolverContext::solve_traced(std::span<const double> payoffs) const {
  PteResult res;
  std::uint64_t remaining =
      (leaf_count_ == 64) ? ~0ULL : ((1ULL << leaf_count_) - 1);
  for (int r = 0; r <= leaf_count_; ++r) {
    EliminationRound round;
    round.thresholds.resize(player_count_);
    std::uint64_t kept = remaining;
    for (PlayerId p = 0; p < player_count_; ++p) {
      const double m = maximin(p, remaining, payoffs);
      round.thresholds[p] = m;
      std::uint64_t live = remaining;
      while (live) {
        const int k = std::countr_zero(live);
        live &= live - 1;
        if (payoffs[k * player_count_ + p] < m) kept &= ~(1ULL << k);
      }
    }
    std::uint64_t gone = remaining & ~kept;
    while (gone) {
      const int k = std::countr_zero(gone);
      gone &= gone - 1;
      round.eliminated.push_back(k);
    }
    const bool fixpoint = round.eliminated.empty();
    res.trace.rounds.push_back(std::move(round));
    if (kept == 0) {
      res.status = PteStatus::NoEquilibrium;
      return res;
    }
    remaining = kept;
    if (fixpoint) break;
  }
  std::uint64_t live = remaining;
  while (live) {
    const int k = std::countr_zero(live);
    live &= live - 1;
    res.trace.surviving.push_back(k);
  }
  if (res.trace.surviving.size() == 1) {
    res.status = PteStatus::Unique;
    res.leaf = res.trace.surviving[0];
  } else {
    res.status = PteStatus::NonGeneric;
  }
  return res;
}

PteResult pte_solve(const SolverContext& ctx, const Game& game) {
  std::vector<double> payoffs;
  payoffs.reserve(ctx.leaf_count() * ctx.player_count());
  for (NodeId z : ctx.leaves()) {
    for (PlayerId p = 0; p < ctx.player_count(); ++p) {
      payoffs.push_back(game.nodes[z].payoffs[p]);
    }
  }
  PteResult res = ctx.solve_traced(payoffs);
  // Map leaf indices back to node ids.
  if (res.status == PteStatus::Unique) res.leaf = ctx.leaves()[res.leaf];
  for (auto& r : res.trace.rounds) {
    for (auto& z : r.eliminated) z = ctx.leaves()[z];
  }
  for (auto& z : res.trace.surviving) z = ctx.leaves()[z];
  return res;
}

}  // namespace epr
