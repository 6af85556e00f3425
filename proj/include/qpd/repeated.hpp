#pragma once
// Infinitely repeated play of the entangled stage game: discounted payoff
// accounting, trigger strategies (punish by mixing X/Y forever, or punish
// with a lock-in branch), their analytic equilibrium conditions, and a
// seeded Monte-Carlo simulator driven by small strategy automata.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "payoff.hpp"
#include "quantum.hpp"
#include "rng.hpp"

namespace qpd {

inline void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("discount factor must lie strictly inside (0, 1); got " +
                            std::to_string(delta));
}

// --- discounted payoff streams ---------------------------------------------

// Review periods: period i spans tau_i rounds and contributes one payoff
// entry weighted by the review cost f(tau_i), with f(1) = 1.
struct Schedule {
  std::vector<int> periods;                 // empty means tau_i == 1 throughout
  std::function<double(int)> review_cost;   // f; defaults to f == 1

  Schedule() : review_cost([](int) { return 1.0; }) {}
  explicit Schedule(std::vector<int> taus)
      : periods(std::move(taus)), review_cost([](int) { return 1.0; }) {}
  Schedule(std::vector<int> taus, std::function<double(int)> f)
      : periods(std::move(taus)), review_cost(std::move(f)) {}
};

// period_start: period i carries weight delta^(tau_1 + ... + tau_{i-1}),
// so the first period is undiscounted and a constant unit-period stream c
// sums to c/(1-delta). period_end shifts every exponent one period later
// (weight delta^(tau_1 + ... + tau_i)).
enum class DiscountConvention { period_start, period_end };

inline double discounted_total(const std::vector<double>& payoffs,
                               const Schedule& schedule, double delta,
                               DiscountConvention convention =
                                   DiscountConvention::period_start) {
  check_delta(delta);
  if (payoffs.empty()) return 0.0;
  if (!schedule.periods.empty() && schedule.periods.size() < payoffs.size())
    throw std::domain_error("schedule supplies fewer periods than payoff entries");
  if (std::abs(schedule.review_cost(1) - 1.0) > 1e-12)
    throw std::domain_error("review cost must satisfy f(1) = 1");
  double total = 0.0;
  long long elapsed = 0;  // rounds before the current period
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    const int tau = schedule.periods.empty() ? 1 : schedule.periods[i];
    if (tau <= 0) throw std::domain_error("review periods must be positive");
    const long long exponent =
        convention == DiscountConvention::period_start ? elapsed : elapsed + tau;
    total += std::pow(delta, static_cast<double>(exponent)) *
             schedule.review_cost(tau) * payoffs[i];
    elapsed += tau;
  }
  return total;
}

inline double discounted_total(const std::vector<double>& payoffs, double delta,
                               DiscountConvention convention =
                                   DiscountConvention::period_start) {
  return discounted_total(payoffs, Schedule{}, delta, convention);
}

// Infinite-horizon value of a constant unit-period stream.
inline double geometric_total(double stage_payoff, double delta) {
  check_delta(delta);
  return stage_payoff / (1.0 - delta);
}

// --- trigger strategy 1: deviation starts perpetual X/Y mixing -------------

// Expected stage payoff while both players mix X and Y half-half.
inline double trigger1_punish_stage(double theta, const PayoffParams& g) {
  check_theta(theta);
  return 0.5 * (g.p + barred(g, theta).p_bar);
}

// Smallest discount factor deterring the one-shot deviation (which earns t
// against a cooperating opponent at every theta).
inline double trigger1_delta_inf(double theta, const PayoffParams& g) {
  return (g.t - g.r) / (g.t - trigger1_punish_stage(theta, g));
}

// Cooperation value minus the best one-shot deviation value; positive iff
// delta > trigger1_delta_inf(theta).
inline double trigger1_deviation_gap(double theta, double delta,
                                     const PayoffParams& g) {
  check_delta(delta);
  const double punish = trigger1_punish_stage(theta, g);
  return g.r / (1.0 - delta) - (g.t + delta * punish / (1.0 - delta));
}

// The punishment phase is itself credible only while the half-half X/Y
// profile is a stage equilibrium.
inline bool trigger1_punishment_credible(double theta, const PayoffParams& g) {
  check_theta(theta);
  if (g.t + g.s < g.r + g.p) return true;
  const double s2 = std::sin(theta) * std::sin(theta);
  return s2 < 2.0 * (g.p - g.s) / (g.t - g.r + g.p - g.s);
}

inline bool trigger1_is_equilibrium(double theta, double delta,
                                    const PayoffParams& g) {
  check_delta(delta);
  return delta > trigger1_delta_inf(theta, g) &&
         trigger1_punishment_credible(theta, g);
}

// --- trigger strategy 2: punishment can lock into an (X, Y) pattern --------

// Discounted continuation values and the one-shot deviation values from
// each of the three automaton states.
struct LockInValues {
  double v_coop = 0.0;    // cooperate forever
  double v_dev1 = 0.0;    // defect once against a cooperator, then punished
  double v_punish = 0.0;  // both mix X/Y until an (X, Y) pattern locks
  double v_dev2 = 0.0;    // deviate from the mixing phase once
  double v_locked = 0.0;  // hold the locked (X, Y) pattern forever
  double v_dev3 = 0.0;    // break the locked pattern once
};

inline LockInValues trigger2_values(double theta, double delta,
                                    const PayoffParams& g) {
  check_theta(theta);
  check_delta(delta);
  const BarredParams b = barred(g, theta);
  LockInValues v;
  v.v_coop = g.r / (1.0 - delta);
  v.v_punish = 0.5 / (1.0 - 0.5 * delta) * (g.p + b.p_bar / (1.0 - delta));
  v.v_dev1 = g.t + delta * v.v_punish;
  v.v_dev2 = 0.5 * b.s_bar + delta * v.v_punish;
  v.v_locked = b.p_bar / (1.0 - delta);
  v.v_dev3 = b.s_bar + delta * v.v_punish;
  return v;
}

inline bool trigger2_is_equilibrium(double theta, double delta,
                                    const PayoffParams& g) {
  if (!(g.r > 0.5 * (g.t + g.p))) return false;
  const LockInValues v = trigger2_values(theta, delta, g);
  return v.v_coop > v.v_dev1 && v.v_punish > v.v_dev2 && v.v_locked > v.v_dev3;
}

enum class TriggerVariant { trigger1, trigger2 };

inline const char* to_string(TriggerVariant v) {
  return v == TriggerVariant::trigger1 ? "trigger1" : "trigger2";
}

// Smallest delta above which the trigger stays an equilibrium all the way
// to delta -> 1 (the equilibrium set in delta is an up-interval for both
// variants). nullopt when no delta < 1 works at this theta.
inline std::optional<double> trigger_delta_min(TriggerVariant variant,
                                               double theta,
                                               const PayoffParams& g,
                                               double tol = 1e-9) {
  check_theta(theta);
  const auto ok = [&](double d) {
    return variant == TriggerVariant::trigger1
               ? trigger1_is_equilibrium(theta, d, g)
               : trigger2_is_equilibrium(theta, d, g);
  };
  double lo = 1e-12, hi = 1.0 - 1e-12;
  if (!ok(hi)) return std::nullopt;
  if (ok(lo)) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

struct BoundaryPoint {
  double theta = 0.0;
  std::optional<double> delta_min;
};

inline std::vector<BoundaryPoint> trigger_region_boundary(
    TriggerVariant variant, const PayoffParams& g,
    const std::vector<double>& theta_grid, double tol = 1e-9) {
  std::vector<BoundaryPoint> curve;
  curve.reserve(theta_grid.size());
  for (const double theta : theta_grid)
    curve.push_back({theta, trigger_delta_min(variant, theta, g, tol)});
  return curve;
}

// --- trigger automata --------------------------------------------------------

enum class TriggerState { cooperate, punish, locked };

inline const char* to_string(TriggerState s) {
  switch (s) {
    case TriggerState::cooperate: return "cooperate";
    case TriggerState::punish: return "punish";
    case TriggerState::locked: return "locked";
  }
  return "?";
}

// Strategy automaton with perfect monitoring of the joint operator choice.
// cooperate: play I; leave on any operator pair other than (I, I).
// punish: mix X and Y half-half; under the lock-in variant an (X, Y) or
//         (Y, X) round freezes each player on the operator they just used.
// locked: repeat the locked operator while the partner keeps the
//         complementary one; anything else returns to punish.
class TriggerAutomaton {
 public:
  explicit TriggerAutomaton(TriggerVariant variant,
                            TriggerState start = TriggerState::cooperate,
                            Pauli locked_op = Pauli::X)
      : variant_(variant), state_(start), locked_op_(locked_op) {
    if (state_ == TriggerState::locked) {
      if (variant_ == TriggerVariant::trigger1)
        throw std::domain_error("the mixing trigger has no locked state");
      if (locked_op_ != Pauli::X && locked_op_ != Pauli::Y)
        throw std::domain_error("locked operator must be X or Y");
    }
  }

  TriggerVariant variant() const { return variant_; }
  TriggerState state() const { return state_; }
  Pauli locked_op() const { return locked_op_; }

  Pauli emit(SplitMix64& rng) const {
    switch (state_) {
      case TriggerState::cooperate: return Pauli::I;
      case TriggerState::punish: return rng.coin() ? Pauli::X : Pauli::Y;
      case TriggerState::locked: return locked_op_;
    }
    return Pauli::I;
  }

  void observe(Pauli own, Pauli partner) {
    switch (state_) {
      case TriggerState::cooperate:
        if (!(own == Pauli::I && partner == Pauli::I))
          state_ = TriggerState::punish;
        break;
      case TriggerState::punish:
        if (variant_ == TriggerVariant::trigger2 &&
            ((own == Pauli::X && partner == Pauli::Y) ||
             (own == Pauli::Y && partner == Pauli::X))) {
          state_ = TriggerState::locked;
          locked_op_ = own;
        }
        break;
      case TriggerState::locked:
        if (!(own == locked_op_ &&
              partner == (locked_op_ == Pauli::X ? Pauli::Y : Pauli::X)))
          state_ = TriggerState::punish;
        break;
    }
  }

 private:
  TriggerVariant variant_;
  TriggerState state_;
  Pauli locked_op_;
};

// Transition on the last joint action, then emit the next operator.
inline Pauli step_automaton(TriggerAutomaton& automaton, Pauli own,
                            Pauli partner, SplitMix64& rng) {
  automaton.observe(own, partner);
  return automaton.emit(rng);
}

// --- stage-game lookup table -------------------------------------------------

// Expected payoffs and outcome distributions for every (input basis state,
// operator pair), precomputed once so simulated rounds are table lookups.
class StageGameTable {
 public:
  StageGameTable(double theta, const PayoffParams& g) : theta_(theta), params_(g) {
    check_theta(theta);
    for (int in = 0; in < 4; ++in) {
      const TwoQubitState start = TwoQubitState::basis(static_cast<Outcome>(in));
      for (int a = 0; a < 4; ++a) {
        const PureStrategy xa = PureStrategy::from_pauli(static_cast<Pauli>(a));
        for (int b = 0; b < 4; ++b) {
          const PureStrategy xb = PureStrategy::from_pauli(static_cast<Pauli>(b));
          const TwoQubitState out = evolve_from(start, xa, xb, theta);
          pay_a_[in][a][b] = expected_payoff(out, g, Player::A);
          pay_b_[in][a][b] = expected_payoff(out, g, Player::B);
          dist_[in][a][b] = outcome_distribution(out);
        }
      }
    }
  }

  double theta() const { return theta_; }
  const PayoffParams& params() const { return params_; }

  double payoff_a(Outcome in, Pauli a, Pauli b) const {
    return pay_a_[idx(in)][idx(a)][idx(b)];
  }
  double payoff_b(Outcome in, Pauli a, Pauli b) const {
    return pay_b_[idx(in)][idx(a)][idx(b)];
  }
  const std::array<double, 4>& distribution(Outcome in, Pauli a, Pauli b) const {
    return dist_[idx(in)][idx(a)][idx(b)];
  }

 private:
  static int idx(Outcome o) { return static_cast<int>(o); }
  static int idx(Pauli p) { return static_cast<int>(p); }

  double theta_;
  PayoffParams params_;
  double pay_a_[4][4][4] = {};
  double pay_b_[4][4][4] = {};
  std::array<double, 4> dist_[4][4][4] = {};
};

// --- simulation ---------------------------------------------------------------

// stage_reset restarts every round from |CC>; collapse_continue feeds the
// measured basis state into the next round's evolution.
enum class StateHandling { stage_reset, collapse_continue };

struct ForcedMove {
  int round = 0;
  Pauli op = Pauli::I;
};

struct SimulationOptions {
  double delta = 0.9;
  int horizon = 256;
  StateHandling mode = StateHandling::stage_reset;
  DiscountConvention convention = DiscountConvention::period_start;
  std::vector<ForcedMove> forced_a, forced_b;  // scripted overrides; no rng use
  bool record_rounds = true;
};

struct RoundRecord {
  Pauli op_a = Pauli::I, op_b = Pauli::I;
  Outcome outcome = Outcome::CC;
  double payoff_a = 0.0, payoff_b = 0.0;  // stage expectations given the ops
};

struct RepeatedGameResult {
  double total_a = 0.0, total_b = 0.0;  // discounted totals
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
};

namespace detail {
inline const Pauli* find_forced(const std::vector<ForcedMove>& forced, int round) {
  for (const ForcedMove& f : forced)
    if (f.round == round) return &f.op;
  return nullptr;
}
}  // namespace detail

// One episode. Per round the rng is consumed in a fixed order (A's emission,
// B's emission, outcome sample); forced moves skip the emission draw. Stage
// payoffs are expectation values; the sampled outcome feeds the history and,
// in collapse_continue mode, the next round's input state.
inline RepeatedGameResult run_episode(TriggerAutomaton a, TriggerAutomaton b,
                                      const StageGameTable& table,
                                      const SimulationOptions& opt,
                                      std::uint64_t seed) {
  if (opt.horizon < 1) throw std::domain_error("horizon must be at least 1");
  check_delta(opt.delta);
  SplitMix64 rng(seed);
  RepeatedGameResult result;
  result.seed = seed;
  if (opt.record_rounds) result.rounds.reserve(static_cast<std::size_t>(opt.horizon));
  Outcome in = Outcome::CC;
  double weight =
      opt.convention == DiscountConvention::period_start ? 1.0 : opt.delta;
  for (int t = 0; t < opt.horizon; ++t) {
    const Pauli* fa = detail::find_forced(opt.forced_a, t);
    const Pauli* fb = detail::find_forced(opt.forced_b, t);
    const Pauli op_a = fa ? *fa : a.emit(rng);
    const Pauli op_b = fb ? *fb : b.emit(rng);
    const double pay_a = table.payoff_a(in, op_a, op_b);
    const double pay_b = table.payoff_b(in, op_a, op_b);
    const Outcome out = sample_outcome(table.distribution(in, op_a, op_b), rng);
    result.total_a += weight * pay_a;
    result.total_b += weight * pay_b;
    if (opt.record_rounds) result.rounds.push_back({op_a, op_b, out, pay_a, pay_b});
    a.observe(op_a, op_b);
    b.observe(op_b, op_a);
    if (opt.mode == StateHandling::collapse_continue) in = out;
    weight *= opt.delta;
  }
  return result;
}

inline RepeatedGameResult simulate(const TriggerAutomaton& a,
                                   const TriggerAutomaton& b, double theta,
                                   double delta, const PayoffParams& g,
                                   int horizon, std::uint64_t seed,
                                   StateHandling mode = StateHandling::stage_reset) {
  const StageGameTable table(theta, g);
  SimulationOptions opt;
  opt.delta = delta;
  opt.horizon = horizon;
  opt.mode = mode;
  return run_episode(a, b, table, opt, seed);
}

struct BatchSummary {
  long episodes = 0;
  double mean_a = 0.0, mean_b = 0.0;
  double stddev_a = 0.0, stddev_b = 0.0;  // sample stddev of episode totals

  double stderr_a() const {
    return episodes > 0 ? stddev_a / std::sqrt(static_cast<double>(episodes)) : 0.0;
  }
  double stderr_b() const {
    return episodes > 0 ? stddev_b / std::sqrt(static_cast<double>(episodes)) : 0.0;
  }
};

// Independent episodes with per-episode seeds derived from the base seed.
inline BatchSummary run_batch(const TriggerAutomaton& a, const TriggerAutomaton& b,
                              const StageGameTable& table, SimulationOptions opt,
                              std::uint64_t seed, long episodes) {
  if (episodes < 1) throw std::domain_error("episode count must be at least 1");
  opt.record_rounds = false;
  BatchSummary s;
  double m2_a = 0.0, m2_b = 0.0;
  for (long e = 0; e < episodes; ++e) {
    const RepeatedGameResult r =
        run_episode(a, b, table, opt, derive_seed(seed, static_cast<std::uint64_t>(e)));
    ++s.episodes;
    const double da = r.total_a - s.mean_a;
    s.mean_a += da / static_cast<double>(s.episodes);
    m2_a += da * (r.total_a - s.mean_a);
    const double db = r.total_b - s.mean_b;
    s.mean_b += db / static_cast<double>(s.episodes);
    m2_b += db * (r.total_b - s.mean_b);
  }
  if (s.episodes > 1) {
    s.stddev_a = std::sqrt(m2_a / static_cast<double>(s.episodes - 1));
    s.stddev_b = std::sqrt(m2_b / static_cast<double>(s.episodes - 1));
  }
  return s;
}

}  // namespace qpd
