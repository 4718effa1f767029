#include "epr/pte_soft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "epr/util.hpp"

namespace epr {

namespace {

double stable_sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Weighted LSE max over pre-filtered entries; min via negation. The shift
// is taken in value space so constant inputs come back exactly.
double lse(std::span<const double> values, std::span<const double> weights,
           double tau, ExtremumMode mode) {
  const double sign = (mode == ExtremumMode::Min) ? -1.0 : 1.0;
  double shift = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < values.size(); ++i) {
    shift = std::max(shift, sign * values[i]);
  }
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * std::exp((sign * values[i] - shift) / tau);
    den += weights[i];
  }
  return sign * (shift + tau * std::log(num / den));
}

std::vector<double> leaf_payoffs_of(const SolverContext& ctx,
                                    const Game& game) {
  std::vector<double> payoffs;
  payoffs.reserve(ctx.leaf_count() * ctx.player_count());
  for (NodeId z : ctx.leaves()) {
    for (PlayerId p = 0; p < ctx.player_count(); ++p) {
      payoffs.push_back(game.nodes[z].payoffs[p]);
    }
  }
  return payoffs;
}

}  // namespace

double smooth_extremum(std::span<const double> values,
                       std::span<const double> weights, double tau,
                       ExtremumMode mode) {
  if (tau <= 0) throw InputError("smooth_extremum: tau must be positive");
  if (values.size() != weights.size() || values.empty()) {
    throw InputError("smooth_extremum: values/weights size mismatch");
  }
  bool any = false;
  for (double w : weights) any = any || w != 0.0;
  if (!any) throw InputError("smooth_extremum: all weights are zero");
  // Drop zero-weight entries so they cannot poison the shift.
  std::vector<double> v, w;
  for (size_t i = 0; i < values.size(); ++i) {
    if (weights[i] != 0.0) {
      v.push_back(values[i]);
      w.push_back(weights[i]);
    }
  }
  return lse(v, w, tau, mode);
}

double anneal_temperature(std::int64_t step, const TemperatureSchedule& s) {
  if (!(s.tau_start >= s.tau_end && s.tau_end > 0)) {
    throw InputError("temperature schedule requires tau_start >= tau_end > 0");
  }
  if (s.total_steps <= 0 || step >= s.total_steps) return s.tau_end;
  if (step <= 0) return s.tau_start;
  const double f = static_cast<double>(step) / s.total_steps;
  if (s.shape == TemperatureSchedule::Shape::Linear) {
    return s.tau_start + (s.tau_end - s.tau_start) * f;
  }
  return s.tau_start * std::pow(s.tau_end / s.tau_start, f);
}

double soft_maximin(const SolverContext& ctx, PlayerId player,
                    std::span<const double> retention,
                    std::span<const double> payoffs, double tau) {
  const int players = ctx.player_count();
  double total = 0.0, top = 0.0;
  for (double w : retention) {
    total += w;
    top = std::max(top, w);
  }
  if (total <= 0.0) {
    throw InputError("soft_maximin: zero total retention");
  }
  const double cut = top * kRetentionRelCutoff;

  std::vector<double> strat_vals;
  std::vector<double> v, w;
  // The absolute mass rule is skipped when it would silence every strategy
  // (possible right after the underflow clamp).
  for (const bool use_mass_rule : {true, false}) {
    for (int s = 0; s < ctx.strategy_count(player); ++s) {
      const std::uint64_t smask = ctx.strategy_mask(player, s);
      v.clear();
      w.clear();
      double mass = 0.0;
      std::uint64_t live = smask;
      while (live) {
        const int k = std::countr_zero(live);
        live &= live - 1;
        mass += retention[k];
        if (retention[k] >= cut) {
          v.push_back(payoffs[k * players + player]);
          w.push_back(retention[k]);
        }
      }
      if (v.empty() || (use_mass_rule && mass < kStrategyMassCutoff)) continue;
      strat_vals.push_back(lse(v, w, tau, ExtremumMode::Min));
    }
    if (!strat_vals.empty()) break;
  }
  if (strat_vals.empty()) {
    // Unreachable while some retention is positive (the top-retention leaf
    // is consistent with one strategy of every player); kept as a guard.
    throw NumericError("soft_maximin: every strategy excluded");
  }
  const std::vector<double> ones(strat_vals.size(), 1.0);
  return lse(strat_vals, ones, tau, ExtremumMode::Max);
}

std::vector<double> soft_eliminate_round(const SolverContext& ctx,
                                         std::span<const double> retention,
                                         std::span<const double> payoffs,
                                         double tau) {
  const int players = ctx.player_count();
  std::vector<double> m(players);
  for (PlayerId p = 0; p < players; ++p) {
    m[p] = soft_maximin(ctx, p, retention, payoffs, tau);
  }
  std::vector<double> out(retention.begin(), retention.end());
  for (int k = 0; k < ctx.leaf_count(); ++k) {
    double f = 1.0;
    for (PlayerId p = 0; p < players; ++p) {
      f *= stable_sigmoid((payoffs[k * players + p] - m[p]) / tau);
    }
    out[k] *= f;
  }
  return out;
}

SoftSolveResult soft_solve(const SolverContext& ctx,
                           std::span<const double> payoffs, double tau,
                           int rounds) {
  if (tau <= 0) throw InputError("soft_solve: tau must be positive");
  if (rounds < 1) throw InputError("soft_solve: rounds must be >= 1");
  SoftSolveResult res;
  res.temperature = tau;
  std::vector<double> w(ctx.leaf_count(), 1.0);
  for (int r = 0; r < rounds; ++r) {
    w = soft_eliminate_round(ctx, w, payoffs, tau);
    double total = 0.0;
    for (double x : w) total += x;
    if (total == 0.0) {
      std::fill(w.begin(), w.end(), kRetentionFloor);
      res.numeric_floor = true;
    }
    res.retention_rounds.push_back(w);
  }
  double total = 0.0;
  for (double x : w) total += x;
  res.distribution.resize(w.size());
  for (size_t k = 0; k < w.size(); ++k) res.distribution[k] = w[k] / total;
  return res;
}

double soft_maximin(const Game& game, PlayerId player,
                    std::span<const double> retention, double tau) {
  SolverContext ctx(game);
  return soft_maximin(ctx, player, retention, leaf_payoffs_of(ctx, game), tau);
}

std::vector<double> soft_eliminate_round(const Game& game,
                                         std::span<const double> retention,
                                         double tau) {
  SolverContext ctx(game);
  return soft_eliminate_round(ctx, retention, leaf_payoffs_of(ctx, game), tau);
}

SoftSolveResult soft_solve(const Game& game, double tau, int rounds) {
  SolverContext ctx(game);
  return soft_solve(ctx, leaf_payoffs_of(ctx, game), tau, rounds);
}

// ---------------------------------------------------------------------------
// Tape path. Mirrors the double path op for op; every branch decision
// (cutoffs, max-shift) is taken on detached forward values, which is exact
// for LSE (shift invariance) and piecewise-constant for the cutoffs.

namespace {

using Ti = Tape::Index;

Ti lse_tape(Tape& t, std::span<const Ti> values, std::span<const double> weights,
            double tau, ExtremumMode mode) {
  const double sign = (mode == ExtremumMode::Min) ? -1.0 : 1.0;
  double shift = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < values.size(); ++i) {
    shift = std::max(shift, sign * t.value(values[i]));
  }
  Ti num = t.constant(0.0);
  double den = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    const Ti x = t.scale(t.add_const(t.scale(values[i], sign), -shift), 1.0 / tau);
    num = t.add(num, t.scale(t.exp_(x), weights[i]));
    den += weights[i];
  }
  const Ti inner = t.add_const(t.scale(t.log_(t.scale(num, 1.0 / den)), tau), shift);
  return t.scale(inner, sign);
}

// Weighted-by-tape-retention variant (weights are tape nodes).
Ti lse_tape_w(Tape& t, std::span<const Ti> values, std::span<const Ti> weights,
              double tau, ExtremumMode mode) {
  const double sign = (mode == ExtremumMode::Min) ? -1.0 : 1.0;
  double shift = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < values.size(); ++i) {
    shift = std::max(shift, sign * t.value(values[i]));
  }
  Ti num = t.constant(0.0);
  Ti den = t.constant(0.0);
  for (size_t i = 0; i < values.size(); ++i) {
    const Ti x = t.scale(t.add_const(t.scale(values[i], sign), -shift), 1.0 / tau);
    num = t.add(num, t.mul(weights[i], t.exp_(x)));
    den = t.add(den, weights[i]);
  }
  const Ti inner = t.add_const(t.scale(t.log_(t.div(num, den)), tau), shift);
  return t.scale(inner, sign);
}

Ti soft_maximin_tape(Tape& t, const SolverContext& ctx, PlayerId player,
                     std::span<const Ti> retention, std::span<const Ti> payoffs,
                     double tau) {
  const int players = ctx.player_count();
  double top = 0.0;
  for (Ti w : retention) top = std::max(top, t.value(w));
  const double cut = top * kRetentionRelCutoff;

  std::vector<Ti> strat_vals;
  std::vector<Ti> v, w;
  for (const bool use_mass_rule : {true, false}) {
    for (int s = 0; s < ctx.strategy_count(player); ++s) {
      const std::uint64_t smask = ctx.strategy_mask(player, s);
      v.clear();
      w.clear();
      double mass = 0.0;
      std::uint64_t live = smask;
      while (live) {
        const int k = std::countr_zero(live);
        live &= live - 1;
        mass += t.value(retention[k]);
        if (t.value(retention[k]) >= cut) {
          v.push_back(payoffs[k * players + player]);
          w.push_back(retention[k]);
        }
      }
      if (v.empty() || (use_mass_rule && mass < kStrategyMassCutoff)) continue;
      strat_vals.push_back(lse_tape_w(t, v, w, tau, ExtremumMode::Min));
    }
    if (!strat_vals.empty()) break;
  }
  if (strat_vals.empty()) {
    throw NumericError("soft_maximin: every strategy excluded");
  }
  const std::vector<double> ones(strat_vals.size(), 1.0);
  return lse_tape(t, strat_vals, ones, tau, ExtremumMode::Max);
}

}  // namespace

SoftSolveGrad soft_solve_with_gradient(const SolverContext& ctx,
                                       std::span<const double> payoffs,
                                       double tau, int rounds, Tape& tape) {
  if (tau <= 0) throw InputError("soft_solve: tau must be positive");
  if (rounds < 1) throw InputError("soft_solve: rounds must be >= 1");
  const int leaves = ctx.leaf_count();
  const int players = ctx.player_count();
  const int entries = leaves * players;

  tape.reset();
  std::vector<Ti> pay(entries);
  for (int e = 0; e < entries; ++e) pay[e] = tape.constant(payoffs[e]);

  SoftSolveGrad out;
  out.result.temperature = tau;

  std::vector<Ti> w(leaves);
  for (int k = 0; k < leaves; ++k) w[k] = tape.constant(1.0);

  for (int r = 0; r < rounds; ++r) {
    std::vector<Ti> m(players);
    for (PlayerId p = 0; p < players; ++p) {
      m[p] = soft_maximin_tape(tape, ctx, p, w, pay, tau);
    }
    for (int k = 0; k < leaves; ++k) {
      Ti f = tape.constant(1.0);
      for (PlayerId p = 0; p < players; ++p) {
        const Ti d = tape.scale(tape.sub(pay[k * players + p], m[p]), 1.0 / tau);
        f = tape.mul(f, tape.sigmoid(d));
      }
      w[k] = tape.mul(w[k], f);
    }
    double total = 0.0;
    for (int k = 0; k < leaves; ++k) total += tape.value(w[k]);
    if (total == 0.0) {
      // Gradient is lost below the floor; the flag tells callers to discount
      // this sample.
      for (int k = 0; k < leaves; ++k) w[k] = tape.constant(kRetentionFloor);
      out.result.numeric_floor = true;
    }
    std::vector<double> snap(leaves);
    for (int k = 0; k < leaves; ++k) snap[k] = tape.value(w[k]);
    out.result.retention_rounds.push_back(std::move(snap));
  }

  Ti total = tape.constant(0.0);
  for (int k = 0; k < leaves; ++k) total = tape.add(total, w[k]);
  std::vector<Ti> dist(leaves);
  for (int k = 0; k < leaves; ++k) dist[k] = tape.div(w[k], total);

  out.result.distribution.resize(leaves);
  out.jacobian.assign(static_cast<size_t>(leaves) * entries, 0.0);
  for (int z = 0; z < leaves; ++z) {
    out.result.distribution[z] = tape.value(dist[z]);
    tape.backward(dist[z]);
    for (int e = 0; e < entries; ++e) {
      out.jacobian[static_cast<size_t>(z) * entries + e] = tape.adjoint(pay[e]);
    }
  }
  return out;
}

}  // namespace epr
