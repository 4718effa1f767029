#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "epr/quantum_target.hpp"
#include "epr/reward_models.hpp"
#include "epr/scenario.hpp"
#include "epr/types.hpp"

namespace epr {

struct JointHistogram {
  std::array<std::int64_t, 16> counts{};
  std::int64_t runs = 0;
  std::int64_t nongeneric_count = 0;  // skipped (run, pair) solves

  std::int64_t total_counts() const;
  double skip_rate() const;  // skips / (4 * runs)
};

/// Fills the 8 leaf payoffs of one setting pair's outcome subgame.
using PayoffFiller =
    std::function<void(HiddenVariable, SettingPair, std::span<double, 8>)>;

/// Exact deterministic evaluation: for run i, lambda is drawn at stream
/// index i; each of the four setting pairs is solved exactly; NonGeneric /
/// NoEquilibrium solves are counted and skipped, never tie-broken. Workers
/// partition the run-index range; per-worker histograms merge by integer
/// addition (exact, order independent).
JointHistogram hard_run_histogram(const PayoffFiller& filler,
                                  const ScenarioConfig& config,
                                  std::int64_t runs, std::uint64_t seed,
                                  int workers = 1);

JointHistogram hard_run_histogram(const RewardModel& model,
                                  const ScenarioConfig& config,
                                  std::int64_t runs, std::uint64_t seed,
                                  int workers = 1);

/// A reward filler whose payoffs depend only on the fixed local assignment
/// (A(a0), A(a1), B(b0), B(b1)), each +-1: the Nash-style classical
/// baseline. The PTE then deterministically plays the assignment at every
/// lambda.
PayoffFiller local_assignment_filler(int a0, int a1, int b0, int b1);

/// counts normalized by total counts; throws InputError when every solve
/// was skipped.
std::array<double, 16> empirical_distribution(const JointHistogram& h);

struct ChshReport {
  std::array<double, 4> correlators{};  // E(a,b), index a*2+b
  double s = 0.0;                        // E00 + E01 + E10 - E11
  std::array<double, 4> placements{};    // minus sign on each term in turn
  double abs_s_max = 0.0;                // max |placements|
  bool violates_bell = false;            // abs_s_max > 2
};

/// Throws InputError naming the first (a,b) block with zero mass.
ChshReport chsh_value(const std::array<double, 16>& dist);

struct ClassicalEnumeration {
  std::array<double, 16> s_values{};  // S per deterministic assignment
  double bound = 0.0;                 // max S; must be exactly 2
  int maximizer_count = 0;            // assignments achieving the bound
};

ClassicalEnumeration classical_chsh_enumeration();
/// Brute-force max |S| over the 16 deterministic local assignments.
double classical_chsh_bound();

struct ComparisonReport {
  double kl = 0.0;  // KL(emp || target), eps = 1e-9
  double tv = 0.0;
  std::array<double, 16> abs_diff{};
  int worst_cell = 0;
  double worst_abs_diff = 0.0;
};

ComparisonReport compare_histograms(const std::array<double, 16>& emp,
                                    const TargetDistribution& target);

void write_histogram_csv(const std::string& path, const JointHistogram& h,
                         const std::vector<std::string>& provenance);
JointHistogram read_histogram_csv(const std::string& path);

struct MetricsReport {
  ChshReport chsh;
  ComparisonReport comparison;
  double skip_rate = 0.0;
  std::int64_t runs = 0;
  std::uint64_t seed = 0;
};

void write_metrics_json(const std::string& path, const MetricsReport& r,
                        const std::string& config_hash);

}  // namespace epr
