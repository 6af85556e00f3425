#pragma once
// Mini-max values, feasible and individually rational payoff sets, the
// cooperation-sustainability checks, and the punishment horizon for the
// three-phase repeated-game construction.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "equilibria.hpp"
#include "linalg.hpp"
#include "payoff.hpp"
#include "quantum.hpp"
#include "rng.hpp"

namespace qpd {

struct NoPunishmentError : std::domain_error {
  using std::domain_error::domain_error;
};

// --- mini-max over pure strategies ------------------------------------------

struct MinimaxPureSolution {
  double value = 0.0;
  PureStrategy minimizer;   // opponent strategy attaining the outer inf
  PureStrategy best_reply;  // responder witness achieving value against it
  long grid_points = 0;     // outer grid resolution; value is an upper bound
};

namespace detail {

// Low-discrepancy point i of a Kronecker sequence on S^3: a generalized
// golden-ratio lattice in the cube mapped through cylindrical coordinates
// (u1 picks the latitude 2-torus, u2/u3 the angles on it), which is
// area-preserving onto the unit 3-sphere.
inline PureStrategy s3_lattice_point(long i) {
  constexpr double g4 = 1.2207440846057596;  // positive root of x^4 = x + 1
  const double a1 = 1.0 / g4, a2 = a1 / g4, a3 = a2 / g4;
  const double n = static_cast<double>(i + 1);
  const auto frac = [](double v) { return v - std::floor(v); };
  const double u1 = frac(0.5 + n * a1);
  const double u2 = frac(0.5 + n * a2);
  const double u3 = frac(0.5 + n * a3);
  const double r1 = std::sqrt(1.0 - u1), r2 = std::sqrt(u1);
  return PureStrategy::normalized(
      r1 * std::cos(2.0 * pi * u2), r1 * std::sin(2.0 * pi * u2),
      r2 * std::cos(2.0 * pi * u3), r2 * std::sin(2.0 * pi * u3));
}

}  // namespace detail

// inf over opponent strategies of the exact best-response value: lattice
// sweep over S^3 followed by a shrinking pattern search around the best
// lattice point. Each evaluation is one symmetric 4x4 eigenproblem.
inline MinimaxPureSolution minimax_pure(double theta, const PayoffParams& g,
                                        long outer_grid = 10000,
                                        double refine_tol = 1e-10) {
  check_theta(theta);
  if (outer_grid < 1) throw std::domain_error("outer grid must be positive");
  const auto response_value = [&](const PureStrategy& xb) {
    return best_response_pure(xb, theta, g).value;
  };
  double best = std::numeric_limits<double>::infinity();
  PureStrategy best_xb = PureStrategy::from_pauli(Pauli::I);
  for (long i = 0; i < outer_grid; ++i) {
    const PureStrategy xb = detail::s3_lattice_point(i);
    const double v = response_value(xb);
    if (v < best) {
      best = v;
      best_xb = xb;
    }
  }
  double step = 0.1;
  while (step > 1e-9) {
    const double before = best;
    for (bool moved = true; moved;) {
      moved = false;
      const std::array<double, 4> c = best_xb.coeffs();
      for (int k = 0; k < 4; ++k) {
        for (const double sign : {1.0, -1.0}) {
          std::array<double, 4> cand = c;
          cand[k] += sign * step;
          const double norm = std::sqrt(cand[0] * cand[0] + cand[1] * cand[1] +
                                        cand[2] * cand[2] + cand[3] * cand[3]);
          if (norm < 1e-12) continue;
          const PureStrategy xb = PureStrategy::normalized(cand[0], cand[1],
                                                           cand[2], cand[3]);
          const double v = response_value(xb);
          if (v < best) {
            best = v;
            best_xb = xb;
            moved = true;
          }
        }
      }
    }
    if (before - best < refine_tol && step < 1e-2) break;
    step *= 0.5;
  }
  MinimaxPureSolution sol;
  sol.value = best;
  sol.minimizer = best_xb;
  sol.best_reply = best_response_pure(best_xb, theta, g).argmax;
  sol.grid_points = outer_grid;
  return sol;
}

// --- mini-max over mixed strategies ------------------------------------------

struct MinimaxMixedSolution {
  double value = 0.0;
  MixedStrategy minimizer;   // opponent mixture attaining the outer min
  MixedStrategy best_reply;  // maximin mixture certifying the value (duality)
};

// Zero-sum value of the 4x4 operator payoff matrix by exhaustive square
// support enumeration: for each row/column support pair solve the equalizing
// linear system and keep the first solution passing primal/dual feasibility.
// Exact at this size; no iterative solver or tuning involved.
inline MinimaxMixedSolution minimax_mixed(double theta, const PayoffParams& g) {
  const Mat4 m = mixed_payoff_matrix(g, theta);
  constexpr double tol = 1e-9;
  std::array<std::vector<int>, 5> masks_by_size;
  for (int mask = 1; mask < 16; ++mask)
    masks_by_size[static_cast<std::size_t>(__builtin_popcount(
                      static_cast<unsigned>(mask)))]
        .push_back(mask);
  for (int k = 1; k <= 4; ++k) {
    for (const int rmask : masks_by_size[static_cast<std::size_t>(k)]) {
      std::vector<int> rows;
      for (int i = 0; i < 4; ++i)
        if (rmask & (1 << i)) rows.push_back(i);
      for (const int cmask : masks_by_size[static_cast<std::size_t>(k)]) {
        std::vector<int> cols;
        for (int j = 0; j < 4; ++j)
          if (cmask & (1 << j)) cols.push_back(j);
        const int n = k + 1;
        // primal: sum_j m[i][j] y_j = v on the row support; sum y = 1
        std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
        std::vector<double> b(static_cast<std::size_t>(n), 0.0);
        for (int r = 0; r < k; ++r) {
          for (int c = 0; c < k; ++c) a[r * n + c] = m[rows[r]][cols[c]];
          a[r * n + k] = -1.0;
        }
        for (int c = 0; c < k; ++c) a[k * n + c] = 1.0;
        b[static_cast<std::size_t>(k)] = 1.0;
        std::vector<double> primal;
        if (!solve_dense(a, b, n, primal)) continue;
        // dual: sum_i x_i m[i][j] = w on the column support; sum x = 1
        std::vector<double> a2(static_cast<std::size_t>(n) * n, 0.0);
        for (int c = 0; c < k; ++c) {
          for (int r = 0; r < k; ++r) a2[c * n + r] = m[rows[r]][cols[c]];
          a2[c * n + k] = -1.0;
        }
        for (int r = 0; r < k; ++r) a2[k * n + r] = 1.0;
        std::vector<double> dual;
        if (!solve_dense(a2, b, n, dual)) continue;
        const double v = primal[static_cast<std::size_t>(k)];
        const double w = dual[static_cast<std::size_t>(k)];
        if (std::abs(v - w) > tol) continue;
        std::array<double, 4> y{}, x{};
        bool nonneg = true;
        for (int c = 0; c < k; ++c) {
          y[static_cast<std::size_t>(cols[c])] = primal[static_cast<std::size_t>(c)];
          if (primal[static_cast<std::size_t>(c)] < -tol) nonneg = false;
        }
        for (int r = 0; r < k; ++r) {
          x[static_cast<std::size_t>(rows[r])] = dual[static_cast<std::size_t>(r)];
          if (dual[static_cast<std::size_t>(r)] < -tol) nonneg = false;
        }
        if (!nonneg) continue;
        bool feasible = true;
        for (int i = 0; i < 4 && feasible; ++i) {
          double row_val = 0.0;
          for (int j = 0; j < 4; ++j) row_val += m[i][j] * y[static_cast<std::size_t>(j)];
          if (row_val > v + tol) feasible = false;
        }
        for (int j = 0; j < 4 && feasible; ++j) {
          double col_val = 0.0;
          for (int i = 0; i < 4; ++i) col_val += x[static_cast<std::size_t>(i)] * m[i][j];
          if (col_val < v - tol) feasible = false;
        }
        if (!feasible) continue;
        MinimaxMixedSolution sol;
        sol.value = v;
        sol.minimizer = MixedStrategy(y);
        sol.best_reply = MixedStrategy(x);
        return sol;
      }
    }
  }
  throw std::runtime_error("support enumeration found no solution");
}

// --- feasible payoff set ------------------------------------------------------

struct PayoffProfile {
  double nu_a = 0.0, nu_b = 0.0;
};

struct FeasibleSet {
  std::vector<PayoffProfile> vertices;  // convex polygon, counterclockwise

  bool contains(const PayoffProfile& q, double eps = 1e-9) const {
    std::vector<Point2> hull;
    hull.reserve(vertices.size());
    for (const PayoffProfile& p : vertices) hull.push_back({p.nu_a, p.nu_b});
    return inside_convex_hull(hull, {q.nu_a, q.nu_b}, eps);
  }
};

struct FeasibleSampling {
  enum class Kind { pauli16, pure_montecarlo };
  Kind kind = Kind::pauli16;
  long samples = 0;
  std::uint64_t seed = 1;

  static FeasibleSampling pauli16() { return {}; }
  static FeasibleSampling pure_montecarlo(long n, std::uint64_t seed = 1) {
    FeasibleSampling s;
    s.kind = Kind::pure_montecarlo;
    s.samples = n;
    s.seed = seed;
    return s;
  }
};

// Payoff profiles achievable by publicly correlated randomization.
// pauli16: exact hull of the 16 operator-pair profiles (the extreme points
// of the Pauli-mixed class). pure_montecarlo: hull of sampled pure-strategy
// profiles, an inner approximation of the full unitary-strategy image.
inline FeasibleSet feasible_set(double theta, const PayoffParams& g,
                                const FeasibleSampling& sampling =
                                    FeasibleSampling::pauli16()) {
  check_theta(theta);
  std::vector<Point2> pts;
  if (sampling.kind == FeasibleSampling::Kind::pauli16) {
    const Mat4 m = mixed_payoff_matrix(g, theta);
    pts.reserve(16);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) pts.push_back({m[i][j], m[j][i]});
  } else {
    if (sampling.samples < 4)
      throw std::domain_error("pure-montecarlo sampling needs at least 4 samples");
    SplitMix64 rng(sampling.seed);
    pts.reserve(static_cast<std::size_t>(sampling.samples));
    for (long i = 0; i < sampling.samples; ++i) {
      const PureStrategy xa = random_pure_strategy(rng);
      const PureStrategy xb = random_pure_strategy(rng);
      pts.push_back({pure_payoff(xa, xb, theta, g, Player::A),
                     pure_payoff(xa, xb, theta, g, Player::B)});
    }
  }
  FeasibleSet fs;
  for (const Point2& p : convex_hull(pts)) fs.vertices.push_back({p.x, p.y});
  return fs;
}

// --- individually rational set ------------------------------------------------

struct IndividuallyRationalSet {
  FeasibleSet feasible;
  double cutoff_a = 0.0, cutoff_b = 0.0;  // mixed mini-max values

  // Membership is strict above the cutoffs; boundary profiles are out.
  bool contains(const PayoffProfile& q, double slack = 1e-9) const {
    return feasible.contains(q) && q.nu_a > cutoff_a + slack &&
           q.nu_b > cutoff_b + slack;
  }
};

inline IndividuallyRationalSet individually_rational_set(double theta,
                                                         const PayoffParams& g) {
  IndividuallyRationalSet s;
  s.feasible = feasible_set(theta, g);
  // the game is symmetric under swapping players, so one value serves both
  s.cutoff_a = s.cutoff_b = minimax_mixed(theta, g).value;
  return s;
}

// --- repeated-game sustainability checks ---------------------------------------

// Existence condition for a pure-strategy subgame perfect equilibrium of
// the infinitely repeated game, as a strict inequality in sin^2(theta).
inline bool pure_spe_exists(double theta, const PayoffParams& g) {
  check_theta(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  return s2 < (std::max(g.r, 0.5 * (g.t + g.s)) - g.s) / (g.t - g.s);
}

// Three indicators about sustaining mutual cooperation at maximal
// entanglement. They are reported separately: the (r, r) membership test in
// V* and the r >= (t+s)/2 threshold disagree on a sliver of parameter space
// (the strict mini-max cutoff can sit below r while r < (t+s)/2).
struct AntiFolkReport {
  bool threshold_holds = false;    // r >= (t+s)/2
  bool vstar_contains_rr = false;  // (r, r) strictly inside V* at theta = pi/2
  bool pareto_dominated = false;   // r < (t+s)/2: some profile beats (r, r)
};

inline AntiFolkReport anti_folk_check(const PayoffParams& g) {
  AntiFolkReport rep;
  rep.threshold_holds = g.r >= 0.5 * (g.t + g.s);
  rep.vstar_contains_rr =
      individually_rational_set(half_pi, g).contains({g.r, g.r});
  rep.pareto_dominated = g.r < 0.5 * (g.t + g.s);
  return rep;
}

// --- punishment horizon ---------------------------------------------------------

// Smallest integer T with d_i < T * (payoff_i(target) - payoff_i(punishment))
// for both players, where d_i is player i's best one-shot deviation gain
// against the target profile (exact over the four operator vertices).
inline int punishment_horizon(const MixedProfile& target,
                              const MixedProfile& punishment, double theta,
                              const PayoffParams& g) {
  check_theta(theta);
  int horizon = 1;
  for (const Player who : {Player::A, Player::B}) {
    const double v_target = mixed_payoff(target.a, target.b, theta, g, who);
    const double v_punish = mixed_payoff(punishment.a, punishment.b, theta, g, who);
    const double gain = v_target - v_punish;
    if (gain <= 1e-12)
      throw NoPunishmentError(
          "target profile does not strictly beat the punishment profile; "
          "this construction cannot enforce it");
    double best_dev = -std::numeric_limits<double>::infinity();
    for (int op = 0; op < 4; ++op) {
      const MixedStrategy pure = MixedStrategy::from_pauli(static_cast<Pauli>(op));
      const double v = who == Player::A
                           ? mixed_payoff(pure, target.b, theta, g, Player::A)
                           : mixed_payoff(target.a, pure, theta, g, Player::B);
      best_dev = std::max(best_dev, v);
    }
    const double d = best_dev - v_target;
    int t = static_cast<int>(std::floor(d / gain)) + 1;
    if (t < 1) t = 1;
    while (!(d < static_cast<double>(t) * gain)) ++t;
    horizon = std::max(horizon, t);
  }
  return horizon;
}

}  // namespace qpd
