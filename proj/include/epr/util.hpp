#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace epr {

inline constexpr const char* kEprlabVersion = "1.0.0";

/// Bad user input (malformed files, out-of-range flags). CLI exit code 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric breakdown (non-finite loss, degenerate state). CLI exit code 2.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bit-exact round-trip encoding for doubles (printf %a / strtod).
std::string to_hex_float(double v);
double from_hex_float(std::string_view s);

/// Shortest decimal that round-trips a double (max_digits10).
std::string format_double(double v);

/// FNV-1a over bytes; used for provenance hashes of canonical configs.
std::uint64_t fnv1a64(std::string_view bytes);

/// Runs fn(begin, end) over [0, n) split into contiguous chunks across
/// `workers` threads. workers <= 1 runs inline. Results must not depend on
/// the partition (callers write to disjoint slots or merge in fixed order).
void parallel_for(std::int64_t n, int workers,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

/// In-place pairwise tree reduction of `count` slots of width `stride`:
/// slot 0 accumulates the fixed-order pairwise sum of all slots. The result
/// is independent of how slots were filled (worker-count independent).
void tree_reduce_slots(std::span<double> data, std::int64_t count,
                       std::int64_t stride);

}  // namespace epr
