#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epr/autodiff.hpp"
#include "epr/game.hpp"
#include "epr/pte_exact.hpp"

namespace epr {

enum class ExtremumMode { Min, Max };

/// Weighted log-sum-exp extremum with max-shift. For max:
///   tau * ln(sum_i w_i e^{v_i/tau} / sum_i w_i)
/// and the negated-input dual for min. Throws InputError when all weights
/// are zero; requires tau > 0.
double smooth_extremum(std::span<const double> values,
                       std::span<const double> weights, double tau,
                       ExtremumMode mode);

struct TemperatureSchedule {
  enum class Shape { Geometric, Linear };
  double tau_start = 1.0;
  double tau_end = 0.01;
  std::int64_t total_steps = 2000;
  Shape shape = Shape::Geometric;
  bool operator==(const TemperatureSchedule&) const = default;
};

/// tau at `step`; clamped to tau_end once step >= total_steps.
double anneal_temperature(std::int64_t step, const TemperatureSchedule& s);

struct SoftSolveResult {
  std::vector<double> distribution;                   // per leaf index
  std::vector<std::vector<double>> retention_rounds;  // after each round
  double temperature = 0.0;
  bool numeric_floor = false;  // total retention underflowed to zero
};

// A leaf enters a strategy's weighted min only while its retention is at
// least kRetentionRelCutoff times the largest retention; a strategy is
// excluded once its consistent mass is negligible. This keeps the
// zero-temperature limit consistent with the exact solver (eliminated
// leaves act like live ones with payoff shifted by their decay otherwise).
inline constexpr double kRetentionRelCutoff = 1e-6;
inline constexpr double kStrategyMassCutoff = 1e-12;
inline constexpr double kRetentionFloor = 1e-300;

double soft_maximin(const SolverContext& ctx, PlayerId player,
                    std::span<const double> retention,
                    std::span<const double> payoffs, double tau);

/// retention'_z = retention_z * prod_p sigmoid((payoff_p(z) - m_p)/tau).
/// Never renormalizes.
std::vector<double> soft_eliminate_round(const SolverContext& ctx,
                                         std::span<const double> retention,
                                         std::span<const double> payoffs,
                                         double tau);

SoftSolveResult soft_solve(const SolverContext& ctx,
                           std::span<const double> payoffs, double tau,
                           int rounds = 4);

// Game-level conveniences using the payoffs stored at the leaves.
double soft_maximin(const Game& game, PlayerId player,
                    std::span<const double> retention, double tau);
std::vector<double> soft_eliminate_round(const Game& game,
                                         std::span<const double> retention,
                                         double tau);
SoftSolveResult soft_solve(const Game& game, double tau, int rounds = 4);

struct SoftSolveGrad {
  SoftSolveResult result;
  /// jacobian[z * (leaves*players) + k*players + p] = d dist_z / d payoff_{k,p}
  std::vector<double> jacobian;
};

/// Same computation recorded on `tape` (reset internally); exact
/// reverse-mode jacobian of the distribution w.r.t. every payoff entry.
SoftSolveGrad soft_solve_with_gradient(const SolverContext& ctx,
                                       std::span<const double> payoffs,
                                       double tau, int rounds, Tape& tape);

}  // namespace epr
