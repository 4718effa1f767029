#pragma once

#include <string>
#include <vector>

#include "epr/util.hpp"

namespace epr {

inline constexpr const char* kVersion = kEprlabVersion;

/// Dispatches a full command line (without the program name). Exit codes:
/// 0 success, 1 input error, 2 numeric failure.
int run_command(const std::vector<std::string>& args);

}  // namespace epr
