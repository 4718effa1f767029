#include "epr/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "epr/pte_exact.hpp"
#include "epr/training.hpp"
#include "epr/util.hpp"

namespace epr {

std::int64_t JointHistogram::total_counts() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

double JointHistogram::skip_rate() const {
  if (runs == 0) return 0.0;
  return static_cast<double>(nongeneric_count) /
         (4.0 * static_cast<double>(runs));
}

JointHistogram hard_run_histogram(const PayoffFiller& filler,
                                  const ScenarioConfig& config,
                                  std::int64_t runs, std::uint64_t seed,
                                  int workers) {
  if (runs < 1) throw InputError("hard_run_histogram: runs must be >= 1");
  const Game shape = build_outcome_subgame(config, SettingPair{0, 0});
  const SolverContext ctx(shape);
  const int players = ctx.player_count();

  const int n_workers = std::max(1, workers);
  std::vector<JointHistogram> partial(n_workers);
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  const std::int64_t chunk = (runs + n_workers - 1) / n_workers;
  for (int t = 0; t < n_workers; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = std::min(runs, lo + chunk);
    if (lo < hi) ranges.emplace_back(lo, hi);
  }

  parallel_for(static_cast<std::int64_t>(ranges.size()), n_workers,
               [&](std::int64_t wlo, std::int64_t whi) {
                 std::array<double, 8> pair_payoffs;
                 std::vector<double> payoffs(4 * players, 0.0);
                 for (std::int64_t w = wlo; w < whi; ++w) {
                   JointHistogram& h = partial[w];
                   for (std::int64_t i = ranges[w].first; i < ranges[w].second;
                        ++i) {
                     const HiddenVariable lam = config.hidden_sample(seed, i);
                     for (const SettingPair& pr : setting_pairs()) {
                       filler(lam, pr, pair_payoffs);
                       for (int k = 0; k < 4; ++k) {
                         payoffs[k * players] = pair_payoffs[k * 2];
                         payoffs[k * players + 1] = pair_payoffs[k * 2 + 1];
                       }
                       const auto res = ctx.solve(payoffs);
                       if (res.status == PteStatus::Unique) {
                         h.counts[cell_index(pr, res.leaf_index)]++;
                       } else {
                         h.nongeneric_count++;
                       }
                     }
                   }
                 }
               });

  JointHistogram out;
  out.runs = runs;
  for (const JointHistogram& h : partial) {
    out.nongeneric_count += h.nongeneric_count;
    for (int c = 0; c < 16; ++c) out.counts[c] += h.counts[c];
  }
  return out;
}

JointHistogram hard_run_histogram(const RewardModel& model,
                                  const ScenarioConfig& config,
                                  std::int64_t runs, std::uint64_t seed,
                                  int workers) {
  const MeasurementAngles angles = config.angles();
  PayoffFiller filler = [&model, angles](HiddenVariable lam, SettingPair pr,
                                         std::span<double, 8> out) {
    fill_subgame_payoffs(model, lam, angles, pr, out);
  };
  return hard_run_histogram(filler, config, runs, seed, workers);
}

PayoffFiller local_assignment_filler(int a0, int a1, int b0, int b1) {
  for (int v : {a0, a1, b0, b1}) {
    if (v != 1 && v != -1) {
      throw InputError("local assignment entries must be +1 or -1");
    }
  }
  return [a0, a1, b0, b1](HiddenVariable, SettingPair pr,
                          std::span<double, 8> out) {
    const int ax = pr.a == 0 ? a0 : a1;
    const int by = pr.b == 0 ? b0 : b1;
    for (int k = 0; k < 4; ++k) {
      out[k * 2] = static_cast<double>(outcome_x(k) * ax);
      out[k * 2 + 1] = static_cast<double>(outcome_y(k) * by);
    }
  };
}

std::array<double, 16> empirical_distribution(const JointHistogram& h) {
  const std::int64_t total = h.total_counts();
  if (total <= 0) {
    throw InputError("empirical_distribution: histogram has no counted runs");
  }
  std::array<double, 16> d{};
  for (int c = 0; c < 16; ++c) {
    d[c] = static_cast<double>(h.counts[c]) / static_cast<double>(total);
  }
  return d;
}

ChshReport chsh_value(const std::array<double, 16>& dist) {
  ChshReport r;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double mass = 0.0, e = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double p = dist[(a * 2 + b) * 4 + k];
        mass += p;
        e += outcome_x(k) * outcome_y(k) * p;
      }
      if (mass <= 0.0) {
        throw InputError("chsh_value: settings block a=" + std::to_string(a) +
                         " b=" + std::to_string(b) + " has no mass");
      }
      r.correlators[a * 2 + b] = e / mass;
    }
  }
  const auto& E = r.correlators;
  for (int m = 0; m < 4; ++m) {
    double s = 0.0;
    for (int t = 0; t < 4; ++t) s += (t == m ? -1.0 : 1.0) * E[t];
    r.placements[m] = s;
    r.abs_s_max = std::max(r.abs_s_max, std::abs(s));
  }
  r.s = r.placements[3];  // minus on E(1,1)
  r.violates_bell = r.abs_s_max > 2.0;
  return r;
}

ClassicalEnumeration classical_chsh_enumeration() {
  ClassicalEnumeration e;
  int idx = 0;
  for (int a0 : {1, -1}) {
    for (int a1 : {1, -1}) {
      for (int b0 : {1, -1}) {
        for (int b1 : {1, -1}) {
          const double s = a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1;
          e.s_values[idx++] = s;
          e.bound = std::max(e.bound, std::abs(s));
        }
      }
    }
  }
  for (double s : e.s_values) {
    if (s == e.bound) e.maximizer_count++;
  }
  return e;
}

double classical_chsh_bound() { return classical_chsh_enumeration().bound; }

ComparisonReport compare_histograms(const std::array<double, 16>& emp,
                                    const TargetDistribution& target) {
  ComparisonReport r;
  r.kl = kl_divergence(emp, target.cells).value;
  for (int c = 0; c < 16; ++c) {
    r.abs_diff[c] = std::abs(emp[c] - target.cells[c]);
    r.tv += 0.5 * r.abs_diff[c];
    if (r.abs_diff[c] > r.worst_abs_diff) {
      r.worst_abs_diff = r.abs_diff[c];
      r.worst_cell = c;
    }
  }
  return r;
}

void write_histogram_csv(const std::string& path, const JointHistogram& h,
                         const std::vector<std::string>& provenance) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open for writing: " + path);
  for (const auto& line : provenance) f << "# " << line << "\n";
  f << "# runs " << h.runs << "\n";
  f << "# nongeneric_skips " << h.nongeneric_count << "\n";
  f << "a,b,x,y,count,frequency\n";
  const std::int64_t total = std::max<std::int64_t>(1, h.total_counts());
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int k = 0; k < 4; ++k) {
        const int c = (a * 2 + b) * 4 + k;
        f << a << ',' << b << ',' << outcome_x(k) << ',' << outcome_y(k) << ','
          << h.counts[c] << ','
          << format_double(static_cast<double>(h.counts[c]) /
                           static_cast<double>(total))
          << "\n";
      }
    }
  }
  if (!f) throw InputError("failed writing: " + path);
}

JointHistogram read_histogram_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open histogram: " + path);
  JointHistogram h;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "runs") ss >> h.runs;
      if (key == "nongeneric_skips") ss >> h.nongeneric_count;
      continue;
    }
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    int a, b, x, y;
    std::int64_t count;
    char comma;
    ss >> a >> comma >> b >> comma >> x >> comma >> y >> comma >> count;
    if (!ss) throw InputError("histogram: malformed row: " + line);
    if (a < 0 || a > 1 || b < 0 || b > 1 || std::abs(x) != 1 ||
        std::abs(y) != 1 || count < 0) {
      throw InputError("histogram: out-of-range row: " + line);
    }
    h.counts[cell_index(a, b, x, y)] = count;
  }
  if (h.runs == 0) {
    // Tolerate hand-written files without the runs comment.
    h.runs = (h.total_counts() + h.nongeneric_count + 3) / 4;
  }
  return h;
}

void write_metrics_json(const std::string& path, const MetricsReport& r,
                        const std::string& config_hash) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open for writing: " + path);
  const auto& E = r.chsh.correlators;
  f << "{\n";
  f << "  \"version\": \"" << kEprlabVersion << "\",\n";
  f << "  \"S\": " << format_double(r.chsh.s) << ",\n";
  f << "  \"abs_S_max\": " << format_double(r.chsh.abs_s_max) << ",\n";
  f << "  \"violates_bell\": " << (r.chsh.violates_bell ? "true" : "false")
    << ",\n";
  f << "  \"correlators\": {\"E00\": " << format_double(E[0])
    << ", \"E01\": " << format_double(E[1])
    << ", \"E10\": " << format_double(E[2])
    << ", \"E11\": " << format_double(E[3]) << "},\n";
  f << "  \"sign_placements\": [" << format_double(r.chsh.placements[0]) << ", "
    << format_double(r.chsh.placements[1]) << ", "
    << format_double(r.chsh.placements[2]) << ", "
    << format_double(r.chsh.placements[3]) << "],\n";
  f << "  \"kl\": " << format_double(r.comparison.kl) << ",\n";
  f << "  \"tv\": " << format_double(r.comparison.tv) << ",\n";
  f << "  \"max_abs_deviation\": " << format_double(r.comparison.worst_abs_diff)
    << ",\n";
  f << "  \"worst_cell\": \"" << cell_label(r.comparison.worst_cell) << "\",\n";
  f << "  \"skip_rate\": " << format_double(r.skip_rate) << ",\n";
  f << "  \"runs\": " << r.runs << ",\n";
  f << "  \"seed\": " << r.seed << ",\n";
  f << "  \"config_hash\": \"" << config_hash << "\"\n";
  f << "}\n";
  if (!f) throw InputError("failed writing: " + path);
}

}  // namespace epr
