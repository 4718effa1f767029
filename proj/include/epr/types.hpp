#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace epr {

/// One joint measurement-setting choice: a indexes Alice's basis, b Bob's.
struct SettingPair {
  int a = 0;  // in {0,1}
  int b = 0;  // in {0,1}
};

/// The four setting pairs in fixed lexicographic order (0,0),(0,1),(1,0),(1,1).
std::array<SettingPair, 4> setting_pairs();

/// Measurement directions in the X-Z plane, radians.
struct MeasurementAngles {
  std::array<double, 2> alice{};
  std::array<double, 2> bob{};
};

/// Per-run hidden variable: an angle in [0, 2*pi).
struct HiddenVariable {
  double lambda = 0.0;
};

// 16-cell tables are indexed by (a, b, x, y) with x,y in {+1,-1}.
// Outcome order matches the subgame leaf order: (+,+),(+,-),(-,+),(-,-).
inline int outcome_index(int x, int y) {
  return (x == 1 ? 0 : 2) + (y == 1 ? 0 : 1);
}

inline int cell_index(int a, int b, int x, int y) {
  return (a * 2 + b) * 4 + outcome_index(x, y);
}

inline int cell_index(const SettingPair& p, int outcome) {
  return (p.a * 2 + p.b) * 4 + outcome;
}

/// Outcome signs for leaf index k in 0..3.
inline int outcome_x(int k) { return k < 2 ? 1 : -1; }
inline int outcome_y(int k) { return (k % 2) == 0 ? 1 : -1; }

/// Human-readable cell label, e.g. "ab=01 xy=+-".
std::string cell_label(int cell);

}  // namespace epr
