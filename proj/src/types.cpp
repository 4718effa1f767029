#include "epr/types.hpp"

namespace epr {

std::array<SettingPair, 4> setting_pairs() {
  return {SettingPair{0, 0}, SettingPair{0, 1}, SettingPair{1, 0},
          SettingPair{1, 1}};
}

std::string cell_label(int cell) {
  const int pair = cell / 4;
  const int k = cell % 4;
  std::string s = "ab=";
  s += static_cast<char>('0' + pair / 2);
  s += static_cast<char>('0' + pair % 2);
  s += " xy=";
  s += outcome_x(k) == 1 ? '+' : '-';
  s += outcome_y(k) == 1 ? '+' : '-';
  return s;
}

}  // namespace epr
