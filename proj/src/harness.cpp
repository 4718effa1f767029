#include "epr/harness.hpp"

#include <cmath>
#include <bit>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

#include "epr/metrics.hpp"
#include "epr/pte_soft.hpp"
#include "epr/quantum_target.hpp"
#include "epr/reward_models.hpp"
#include "epr/scenario.hpp"
#include "epr/training.hpp"
#include "epr/types.hpp"
#include "epr/util.hpp"

namespace epr {

std::array<double, 8> random_epr_payoffs(std::uint64_t seed,
                                         std::uint64_t index) {
  std::array<double, 8> u;
  for (int e = 0; e < 8; ++e) {
    u[e] = 2.0 * uniform01_at(seed, index * 8 + e) - 1.0;
  }
  return u;
}

double elimination_margin(const SolverContext& ctx,
                          std::span<const double> payoffs) {
  const PteResult res = ctx.solve_traced(payoffs);
  const int players = ctx.player_count();
  double margin = std::numeric_limits<double>::infinity();
  std::uint64_t remaining = (ctx.leaf_count() == 64)
                                ? ~0ULL
                                : ((1ULL << ctx.leaf_count()) - 1);
  for (const EliminationRound& round : res.trace.rounds) {
    std::uint64_t live = remaining;
    while (live) {
      const int k = std::countr_zero(live);
      live &= live - 1;
      for (int p = 0; p < players; ++p) {
        const double d = std::abs(payoffs[k * players + p] - round.thresholds[p]);
        if (d > 0) margin = std::min(margin, d);
      }
    }
    for (int k : round.eliminated) remaining &= ~(1ULL << k);
  }
  return margin;
}

namespace {

struct Check {
  SelftestReport* report;
  std::ostream* out;
  void operator()(bool ok, const std::string& name, const std::string& detail) {
    *out << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) *out << " (" << detail << ")";
    *out << "\n";
    (ok ? report->passed : report->failed)++;
  }
};

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

}  // namespace

SelftestReport run_selftests(bool quick, std::ostream& out) {
  SelftestReport rep;
  Check check{&rep, &out};
  const ScenarioConfig cfg;  // defaults
  const Game shape = build_outcome_subgame(cfg, SettingPair{0, 0});
  const SolverContext ctx(shape);

  {  // classical CHSH bound by exhaustive enumeration
    const auto e = classical_chsh_enumeration();
    bool values_ok = true;
    for (double s : e.s_values) {
      values_ok = values_ok && (std::abs(s) == 0.0 || std::abs(s) == 2.0);
    }
    check(e.bound == 2.0 && e.maximizer_count == 8 && values_ok,
          "classical CHSH bound",
          "bound=" + format_double(e.bound) +
              " maximizers=" + std::to_string(e.maximizer_count));
  }

  {  // Born rule: closed form vs full trace on random angles
    const DensityMatrix rho = singlet_density();
    const int n = quick ? 200 : 1000;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ta = uniform01_at(11, 2 * i) * 2.0 * std::numbers::pi;
      const double tb = uniform01_at(11, 2 * i + 1) * 2.0 * std::numbers::pi;
      for (int x : {1, -1}) {
        for (int y : {1, -1}) {
          worst = std::max(worst,
                           std::abs(born_joint_prob(rho, ta, tb, x, y) -
                                    singlet_closed_form(ta - tb, x, y)));
        }
      }
    }
    check(worst < 1e-12, "singlet closed form vs Born trace",
          "max |diff|=" + format_double(worst) + " over " + std::to_string(n) +
              " angle pairs");
  }

  {  // default Born target reaches the Tsirelson value
    const auto target = target_histogram(cfg.state, cfg.angles());
    const auto chsh = chsh_value(target.cells);
    const double want = 2.0 * std::sqrt(2.0);
    check(std::abs(chsh.abs_s_max - want) < 1e-12, "default target CHSH",
          "abs_S_max=" + format_double(chsh.abs_s_max));
  }

  {  // zero-temperature consistency of the soft solver
    const int want = quick ? 200 : 1000;
    int found = 0, bad = 0;
    double tv_sum = 0.0;
    std::uint64_t idx = 0;
    while (found < want && idx < 100000) {
      const auto u = random_epr_payoffs(20250901, idx++);
      const auto exact = ctx.solve(u);
      if (exact.status != PteStatus::Unique) continue;
      if (elimination_margin(ctx, u) < 0.025) continue;
      ++found;
      const auto soft = soft_solve(ctx, u, 1e-3, 4);
      double tv = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double point = (k == exact.leaf_index) ? 1.0 : 0.0;
        tv += 0.5 * std::abs(soft.distribution[k] - point);
      }
      tv_sum += tv;
      if (soft.distribution[exact.leaf_index] < 0.999) ++bad;
    }
    check(found == want && bad == 0 && tv_sum / want < 1e-3,
          "soft solver zero-temperature consistency",
          std::to_string(found) + " games, mean TV=" +
              format_double(tv_sum / std::max(1, found)));
  }

  {  // PTE properties: Pareto-optimality, no NonGeneric on distinct payoffs
    const int n = quick ? 500 : 2000;
    bool pareto_ok = true, generic_ok = true;
    for (int i = 0; i < n; ++i) {
      const auto u = random_epr_payoffs(777, i);
      const auto res = ctx.solve(u);
      if (res.status == PteStatus::NonGeneric) generic_ok = false;
      if (res.status != PteStatus::Unique) continue;
      for (int z = 0; z < 4; ++z) {
        if (z == res.leaf_index) continue;
        const bool ge = u[z * 2] >= u[res.leaf_index * 2] &&
                        u[z * 2 + 1] >= u[res.leaf_index * 2 + 1];
        const bool strict = u[z * 2] > u[res.leaf_index * 2] ||
                            u[z * 2 + 1] > u[res.leaf_index * 2 + 1];
        if (ge && strict) pareto_ok = false;
      }
    }
    check(pareto_ok && generic_ok, "PTE Pareto-optimality and genericity",
          std::to_string(n) + " random games");
  }

  {  // soft-solve jacobian vs central finite differences
    const int n = quick ? 10 : 50;
    double worst = 0.0;
    Tape tape;
    for (int i = 0; i < n; ++i) {
      auto u = random_epr_payoffs(4242, i);
      for (double tau : {0.5, 0.1}) {
        const auto g = soft_solve_with_gradient(ctx, u, tau, 4, tape);
        for (int e = 0; e < 8; ++e) {
          const double h = 1e-5;
          const double saved = u[e];
          u[e] = saved + h;
          const auto up = soft_solve(ctx, u, tau, 4);
          u[e] = saved - h;
          const auto dn = soft_solve(ctx, u, tau, 4);
          u[e] = saved;
          for (int z = 0; z < 4; ++z) {
            const double fd = (up.distribution[z] - dn.distribution[z]) / (2 * h);
            worst = std::max(worst, rel_err(g.jacobian[z * 8 + e], fd));
          }
        }
      }
    }
    check(worst < 1e-4, "soft solver gradient vs finite differences",
          "max rel err=" + format_double(worst));
  }

  {  // reward gradients vs finite differences
    double worst = 0.0;
    const MeasurementAngles angles = cfg.angles();
    auto fd_check = [&](RewardModel model) {
      const int n = model.params.size();
      for (int i = 0; i < (quick ? 4 : 16); ++i) {
        const HiddenVariable lam = sample_hidden(99, i);
        const SettingPair pr{static_cast<int>(i % 2), static_cast<int>((i / 2) % 2)};
        const int x = (i % 8) < 4 ? 1 : -1, y = i % 2 == 0 ? 1 : -1;
        const auto g = payoff_gradient(model, lam, angles, pr, x, y);
        for (int j = 0; j < n; ++j) {
          const double h = 1e-6;
          const double saved = model.params.values[j];
          model.params.values[j] = saved + h;
          const auto up = model_payoffs(model, lam, angles, pr, x, y);
          model.params.values[j] = saved - h;
          const auto dn = model_payoffs(model, lam, angles, pr, x, y);
          model.params.values[j] = saved;
          for (int p = 0; p < 2; ++p) {
            const double fd = (up[p] - dn[p]) / (2 * h);
            worst = std::max(worst, rel_err(g[p * n + j], fd));
          }
        }
      }
    };
    fd_check(RewardModel::make_ansatz(0.7));
    fd_check(RewardModel::make_mlp(MlpLayout{{8, 6, 2}}, 5));
    check(worst < 1e-5, "reward model gradients vs finite differences",
          "max rel err=" + format_double(worst));
  }

  {  // end-to-end dKL/dparams vs finite differences at tau = 0.1
    double worst = 0.0;
    const auto target = target_histogram(cfg.state, cfg.angles());
    std::vector<HiddenVariable> batch;
    for (int i = 0; i < 8; ++i) batch.push_back(sample_hidden(31337, i));
    auto e2e = [&](RewardModel model) {
      const double tau = 0.1;
      const int n = model.params.size();
      const auto eh =
          expected_histogram(model, cfg.angles(), tau, batch, 4, 1);
      const auto kl = kl_divergence(eh.hist.cells, target.cells);
      for (int j = 0; j < n; ++j) {
        double g = 0.0;
        for (int c = 0; c < 16; ++c) {
          g += kl.grad[c] * eh.grad[static_cast<size_t>(c) * n + j];
        }
        const double h = 1e-5;
        const double saved = model.params.values[j];
        model.params.values[j] = saved + h;
        const double up = kl_divergence(
            expected_histogram(model, cfg.angles(), tau, batch, 4, 1).hist.cells,
            target.cells).value;
        model.params.values[j] = saved - h;
        const double dn = kl_divergence(
            expected_histogram(model, cfg.angles(), tau, batch, 4, 1).hist.cells,
            target.cells).value;
        model.params.values[j] = saved;
        worst = std::max(worst, rel_err(g, (up - dn) / (2 * h)));
      }
    };
    e2e(RewardModel::make_ansatz(0.9));
    e2e(RewardModel::make_mlp(MlpLayout{{8, 4, 2}}, 17));
    check(worst < 1e-3, "end-to-end KL gradient vs finite differences",
          "max rel err=" + format_double(worst));
  }

  {  // hidden-variable stream: determinism and uniformity
    bool det = true;
    for (int i = 0; i < 1000; ++i) {
      det = det && sample_hidden(5, i).lambda == sample_hidden(5, i).lambda;
    }
    const std::int64_t n = 1000000;
    double mean_cos = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      mean_cos += std::cos(sample_hidden(5, i).lambda);
    }
    mean_cos /= static_cast<double>(n);
    const double bound = 3.0 / std::sqrt(static_cast<double>(n)) / std::sqrt(2.0);
    check(det && std::abs(mean_cos) < bound, "hidden-variable stream",
          "mean cos=" + format_double(mean_cos) +
              " bound=" + format_double(bound));
  }

  return rep;
}

}  // namespace epr
