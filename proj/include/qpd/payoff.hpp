#pragma once
// Stage-game payoffs. Parameters (t, r, p, s) order the four joint actions:
// temptation (D vs C), reward (C,C), punishment (D,D), sucker (C vs D),
// with t > r > p > s >= 0. Alice's payoff operator is diagonal in the
// (CC, CD, DC, DD) basis with entries (r, s, t, p); Bob's swaps s and t.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "linalg.hpp"
#include "quantum.hpp"

namespace qpd {

struct PayoffParams {
  double t, r, p, s;

  PayoffParams(double t_, double r_, double p_, double s_)
      : t(t_), r(r_), p(p_), s(s_) {
    if (!(t > r && r > p && p > s && s >= 0.0))
      throw std::domain_error(
          "payoff parameters must satisfy t > r > p > s >= 0; got t=" +
          std::to_string(t_) + " r=" + std::to_string(r_) +
          " p=" + std::to_string(p_) + " s=" + std::to_string(s_));
  }
};

enum class Player { A, B };

// Entanglement blends each classical payoff with a counterpart weighted by
// sin^2(theta): t~ = t cos^2 + s sin^2, r~ = r cos^2 + p sin^2,
// p~ = p cos^2 + r sin^2, s~ = s cos^2 + t sin^2. At theta = pi/2 the
// quadruple is fully swapped to (s, p, r, t).
struct BarredParams {
  double t_bar, r_bar, p_bar, s_bar;
};

inline BarredParams barred(const PayoffParams& g, double theta) {
  check_theta(theta);
  const double sn = std::sin(theta);
  const double s2 = sn * sn, c2 = 1.0 - sn * sn;
  return {g.t * c2 + g.s * s2, g.r * c2 + g.p * s2, g.p * c2 + g.r * s2,
          g.s * c2 + g.t * s2};
}

// Payoff diagonal over (CC, CD, DC, DD).
inline Vec4 payoff_diagonal(const PayoffParams& g, Player who) {
  return who == Player::A ? Vec4{g.r, g.s, g.t, g.p}
                          : Vec4{g.r, g.t, g.s, g.p};
}

inline CMat4 payoff_operator(const PayoffParams& g, Player who) {
  const Vec4 d = payoff_diagonal(g, who);
  CMat4 op{};
  for (int k = 0; k < 4; ++k) op[k][k] = cplx(d[k], 0.0);
  return op;
}

// <psi| Op |psi>, real part (payoff operators are Hermitian).
inline double expected_payoff(const TwoQubitState& st, const CMat4& op) {
  cplx acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    cplx row = 0.0;
    for (int j = 0; j < 4; ++j) row += op[i][j] * st.amp[j];
    acc += std::conj(st.amp[i]) * row;
  }
  return acc.real();
}

inline double expected_payoff(const TwoQubitState& st, const PayoffParams& g,
                              Player who) {
  const Vec4 d = payoff_diagonal(g, who);
  const std::array<double, 4> pr = outcome_distribution(st);
  return d[0] * pr[0] + d[1] * pr[1] + d[2] * pr[2] + d[3] * pr[3];
}

// Closed-form stage payoff for pure strategies; agrees with the state
// evolution pipeline (evolve -> expected_payoff) to ~1e-15.
inline double pure_payoff(const PureStrategy& xa, const PureStrategy& xb,
                          double theta, const PayoffParams& g, Player who) {
  const std::array<double, 4> pr = pure_outcome_probabilities(xa, xb, theta);
  const Vec4 d = payoff_diagonal(g, who);
  return d[0] * pr[0] + d[1] * pr[1] + d[2] * pr[2] + d[3] * pr[3];
}

// A mixed strategy: probabilities over the operators (I, X, Y, Z).
struct MixedStrategy {
  std::array<double, 4> prob{1.0, 0.0, 0.0, 0.0};

  MixedStrategy() = default;

  explicit MixedStrategy(const std::array<double, 4>& p) : prob(p) {
    double sum = 0.0;
    for (double& v : prob) {
      if (v < -1e-9)
        throw std::domain_error(
            "mixed strategy probabilities must be nonnegative; got " +
            std::to_string(v));
      if (v < 0.0) v = 0.0;
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::domain_error(
          "mixed strategy probabilities must sum to 1; got " +
          std::to_string(sum));
    for (double& v : prob) v /= sum;
  }

  MixedStrategy(double pi_, double px, double py, double pz)
      : MixedStrategy(std::array<double, 4>{pi_, px, py, pz}) {}

  static MixedStrategy from_pauli(Pauli op) {
    std::array<double, 4> p{};
    p[static_cast<int>(op)] = 1.0;
    return MixedStrategy(p);
  }

  static MixedStrategy uniform() { return {0.25, 0.25, 0.25, 0.25}; }

  // the two half-half mixes that show up as equilibrium building blocks
  static MixedStrategy half_xy() { return {0.0, 0.5, 0.5, 0.0}; }
  static MixedStrategy half_iz() { return {0.5, 0.0, 0.0, 0.5}; }
};

// Alice's expected payoff for every pure operator pair; rows index Alice's
// operator, columns Bob's. In barred shorthand:
//   I: ( r  s~  s  r~ )    X: ( t~  p  p~  t )
//   Y: ( t  p~  p  t~ )    Z: ( r~  s  s~  r )
inline Mat4 mixed_payoff_matrix(const PayoffParams& g, double theta) {
  const BarredParams b = barred(g, theta);
  return {{{g.r, b.s_bar, g.s, b.r_bar},
           {b.t_bar, g.p, b.p_bar, g.t},
           {g.t, b.p_bar, g.p, b.t_bar},
           {b.r_bar, g.s, b.s_bar, g.r}}};
}

inline double mixed_payoff(const MixedStrategy& pa, const MixedStrategy& pb,
                           double theta, const PayoffParams& g, Player who) {
  const Mat4 m = mixed_payoff_matrix(g, theta);
  // Bob's payoff is Alice's with the roles of the two mixes swapped.
  const std::array<double, 4>& own = (who == Player::A ? pa : pb).prob;
  const std::array<double, 4>& other = (who == Player::A ? pb : pa).prob;
  return quad_form(own, m, other);
}

inline MixedStrategy random_mixed_strategy(SplitMix64& rng) {
  std::array<double, 4> w;
  double sum = 0.0;
  for (double& v : w) {
    v = -std::log(rng.uniform_pos());
    sum += v;
  }
  for (double& v : w) v /= sum;
  return MixedStrategy(w);
}

}  // namespace qpd
