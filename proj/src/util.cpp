#include "epr/util.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <thread>

namespace epr {

std::string to_hex_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double from_hex_float(std::string_view s) {
  std::string tmp(s);
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (end == tmp.c_str() || *end != '\0') {
    throw InputError("malformed hex float: '" + tmp + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void parallel_for(std::int64_t n, int workers,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    fn(0, n);
    return;
  }
  const int k = static_cast<int>(std::min<std::int64_t>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(k);
  const std::int64_t chunk = (n + k - 1) / k;
  for (int t = 0; t < k; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = std::min<std::int64_t>(lo + chunk, n);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

void tree_reduce_slots(std::span<double> data, std::int64_t count,
                       std::int64_t stride) {
  for (std::int64_t step = 1; step < count; step *= 2) {
    for (std::int64_t i = 0; i + step < count; i += 2 * step) {
      double* dst = data.data() + i * stride;
      const double* src = data.data() + (i + step) * stride;
      for (std::int64_t j = 0; j < stride; ++j) dst[j] += src[j];
    }
  }
}

}  // namespace epr
