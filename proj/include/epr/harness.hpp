#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>

#include "epr/pte_exact.hpp"

namespace epr {

/// iid payoffs in [-1, 1] for the 4-leaf/2-player EPR shape, from the
/// deterministic stream (8 values, layout [leaf][player]).
std::array<double, 8> random_epr_payoffs(std::uint64_t seed,
                                         std::uint64_t index);

/// Smallest nonzero |payoff - threshold| across the exact elimination
/// trace. Games below ~tau*ln(1/cutoff) cannot be resolved by a smooth
/// solver at temperature tau; suites that check zero-temperature
/// consistency reject such draws as off general position.
double elimination_margin(const SolverContext& ctx,
                          std::span<const double> payoffs);

struct SelftestReport {
  int passed = 0;
  int failed = 0;
};

/// Oracle/property batteries behind the `selftest` CLI subcommand. Prints
/// one PASS/FAIL line per battery.
SelftestReport run_selftests(bool quick, std::ostream& out);

}  // namespace epr
