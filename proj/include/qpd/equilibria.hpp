#pragma once
// Stage-game equilibrium construction and verification.
//
// Pure best responses exploit that the payoff is an exact quadratic form in
// the responder's strategy 4-vector, so the optimum over the strategy
// sphere is the top eigenpair of a symmetric 4x4 matrix. Mixed candidates
// come in closed form (an interior equalizer plus half-half boundary
// pairs), and are verified against all vertex deviations.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "linalg.hpp"
#include "payoff.hpp"
#include "quantum.hpp"

namespace qpd {

struct NoEquilibriumError : std::domain_error {
  using std::domain_error::domain_error;
};

struct BestResponse {
  double value = 0.0;
  PureStrategy argmax;
};

// The matrix M with payoff_A(x, xb) = x^T M x for unit x, recovered from
// payoff evaluations at the four operator points and the six midpoints.
inline Mat4 best_response_matrix(const PureStrategy& xb, double theta,
                                 const PayoffParams& g) {
  Mat4 m{};
  std::array<PureStrategy, 4> e;
  for (int k = 0; k < 4; ++k) e[k] = PureStrategy::from_pauli(static_cast<Pauli>(k));
  for (int k = 0; k < 4; ++k)
    m[k][k] = pure_payoff(e[k], xb, theta, g, Player::A);
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      std::array<double, 4> c{};
      c[i] = inv_rt2;
      c[j] = inv_rt2;
      const PureStrategy mid(c[0], c[1], c[2], c[3]);
      const double f = pure_payoff(mid, xb, theta, g, Player::A);
      m[i][j] = m[j][i] = f - 0.5 * (m[i][i] + m[j][j]);
    }
  }
  return m;
}

inline BestResponse best_response_pure(const PureStrategy& xb, double theta,
                                       const PayoffParams& g) {
  const SymmetricEigen eig = eigen_symmetric(best_response_matrix(xb, theta, g));
  Vec4 v = eig.vectors[3];
  for (int k = 0; k < 4; ++k) {  // canonical sign: first sizable entry positive
    if (std::abs(v[k]) > 1e-9) {
      if (v[k] < 0)
        for (double& c : v) c = -c;
      break;
    }
  }
  return {eig.values[3], PureStrategy::normalized(v[0], v[1], v[2], v[3])};
}

// At maximal entanglement the map x_A -> transformed coordinates is an
// orthogonal function of x_B; picking x_A equal to the row that feeds the
// (D,C) outcome gives Alice the temptation payoff t against any fixed x_B.
inline PureStrategy counter_strategy_maximal(const PureStrategy& xb) {
  return PureStrategy::normalized(-xb.beta, xb.delta, xb.alpha, xb.gamma);
}

enum class EquilibriumKind {
  classical_defect,
  pure_family,
  interior_mixed,
  boundary_mixed,
};

inline const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::classical_defect: return "classical_defect";
    case EquilibriumKind::pure_family: return "pure_family";
    case EquilibriumKind::interior_mixed: return "interior_mixed";
    case EquilibriumKind::boundary_mixed: return "boundary_mixed";
  }
  return "?";
}

struct PureProfile {
  PureStrategy a, b;
};

struct MixedProfile {
  MixedStrategy a, b;
};

struct EquilibriumCandidate {
  EquilibriumKind kind{};
  std::variant<PureProfile, MixedProfile> profile;
  double payoff_a = 0.0, payoff_b = 0.0;
  std::string note;

  bool is_pure() const { return std::holds_alternative<PureProfile>(profile); }
};

// --- verification ---------------------------------------------------------

inline bool verify_mixed_equilibrium(const MixedStrategy& pa,
                                     const MixedStrategy& pb, double theta,
                                     const PayoffParams& g, double tol = 1e-9) {
  const Mat4 m = mixed_payoff_matrix(g, theta);
  const double va = quad_form(pa.prob, m, pb.prob);
  const double vb = quad_form(pb.prob, m, pa.prob);
  const Vec4 dev_a = mat_vec(m, pa.prob);  // Bob's payoff per own operator
  const Vec4 dev_b = mat_vec(m, pb.prob);  // Alice's payoff per own operator
  double best_a = dev_b[0], best_b = dev_a[0];
  for (int k = 1; k < 4; ++k) {
    best_a = std::max(best_a, dev_b[k]);
    best_b = std::max(best_b, dev_a[k]);
  }
  return best_a <= va + tol && best_b <= vb + tol;
}

// Payoffs satisfy payoff_B(x, y) = payoff_A(y, x), so one best-response
// routine serves both sides.
inline bool verify_pure_equilibrium(const PureStrategy& xa,
                                    const PureStrategy& xb, double theta,
                                    const PayoffParams& g, double tol = 1e-9) {
  const double va = pure_payoff(xa, xb, theta, g, Player::A);
  const double vb = pure_payoff(xa, xb, theta, g, Player::B);
  return best_response_pure(xb, theta, g).value <= va + tol &&
         best_response_pure(xa, theta, g).value <= vb + tol;
}

inline bool verify_candidate(const EquilibriumCandidate& cand, double theta,
                             const PayoffParams& g, double tol = 1e-9) {
  if (cand.is_pure()) {
    const PureProfile& pp = std::get<PureProfile>(cand.profile);
    return verify_pure_equilibrium(pp.a, pp.b, theta, g, tol);
  }
  const MixedProfile& mp = std::get<MixedProfile>(cand.profile);
  return verify_mixed_equilibrium(mp.a, mp.b, theta, g, tol);
}

// --- closed-form candidates ------------------------------------------------

// Without entanglement the game is classical: any pair of unit vectors
// supported on the X, Y coefficients (both players defect) is an
// equilibrium with payoff (p, p). The returned representative is (X, X).
inline EquilibriumCandidate classical_equilibrium(double theta,
                                                  const PayoffParams& g) {
  check_theta(theta);
  if (theta > 1e-12)
    throw NoEquilibriumError(
        "the defect-defect family is an equilibrium only at theta = 0");
  EquilibriumCandidate c;
  c.kind = EquilibriumKind::classical_defect;
  const PureStrategy x = PureStrategy::from_pauli(Pauli::X);
  c.profile = PureProfile{x, x};
  c.payoff_a = pure_payoff(x, x, theta, g, Player::A);
  c.payoff_b = pure_payoff(x, x, theta, g, Player::B);
  c.note = "family: any unit (0, b, c, 0) for each player";
  return c;
}

// One-parameter family x_A = (0, cos(phi), sin(phi), 0),
// x_B = (0, sin(phi), cos(phi), 0); exists while sin^2(theta) <= p/(t-r+p)
// and pays r sin^2(theta) + p cos^2(theta) to both players.
inline EquilibriumCandidate pure_equilibrium_family(double phi, double theta,
                                                    const PayoffParams& g) {
  check_theta(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double threshold = g.p / (g.t - g.r + g.p);
  if (s2 > threshold)
    throw NoEquilibriumError(
        "the defect-axis family stops being an equilibrium for sin^2(theta) > " +
        std::to_string(threshold) + "; got sin^2(theta) = " + std::to_string(s2));
  EquilibriumCandidate c;
  c.kind = EquilibriumKind::pure_family;
  const PureStrategy xa(0.0, std::cos(phi), std::sin(phi), 0.0);
  const PureStrategy xb(0.0, std::sin(phi), std::cos(phi), 0.0);
  c.profile = PureProfile{xa, xb};
  c.payoff_a = pure_payoff(xa, xb, theta, g, Player::A);
  c.payoff_b = pure_payoff(xa, xb, theta, g, Player::B);
  c.note = "family parameter phi = " + std::to_string(phi) +
           "; valid while sin^2(theta) <= " + std::to_string(threshold);
  return c;
}

// Interior equalizer: p*_I = p*_Z, p*_X = p*_Y chosen so the opponent is
// indifferent between all four operators. Returns nullopt when the closed
// form leaves the probability simplex or its denominator vanishes.
inline std::optional<EquilibriumCandidate> interior_mixed_equilibrium(
    double theta, const PayoffParams& g) {
  check_theta(theta);
  const BarredParams b = barred(g, theta);
  const double denom = (g.t + b.t_bar) - (g.r + b.r_bar) - (g.p + b.p_bar) +
                       (g.s + b.s_bar);  // = 2 (t + s - r - p)
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double pi_ = 0.5 * ((g.s + b.s_bar) - (g.p + b.p_bar)) / denom;
  const double px = 0.5 * ((g.t + b.t_bar) - (g.r + b.r_bar)) / denom;
  if (pi_ < -1e-12 || px < -1e-12) return std::nullopt;
  EquilibriumCandidate c;
  c.kind = EquilibriumKind::interior_mixed;
  const MixedStrategy star(std::array<double, 4>{
      std::max(pi_, 0.0), std::max(px, 0.0), std::max(px, 0.0),
      std::max(pi_, 0.0)});
  c.profile = MixedProfile{star, star};
  c.payoff_a = mixed_payoff(star, star, theta, g, Player::A);
  c.payoff_b = mixed_payoff(star, star, theta, g, Player::B);
  c.note = "equalizer: opponent indifferent across I, X, Y, Z";
  return c;
}

// Half-half boundary equilibria. With D = t - r + p - s (> 0):
//   t + s > r + p: (XY, XY) while sin^2 <= 2(p-s)/D, and the asymmetric
//                  (IZ, XY) once sin^2 >= 2(p-s)/D;
//   t + s <= r + p: (XY, XY) for every theta, and (IZ, IZ) once
//                  sin^2 >= 2(t-r)/D.
// Thresholds are included on both sides (candidates are weak equilibria at
// equality), which the note strings document.
inline std::vector<EquilibriumCandidate> boundary_mixed_equilibria(
    double theta, const PayoffParams& g) {
  check_theta(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double d = g.t - g.r + g.p - g.s;
  std::vector<EquilibriumCandidate> out;
  const MixedStrategy xy = MixedStrategy::half_xy();
  const MixedStrategy iz = MixedStrategy::half_iz();

  auto push = [&](const MixedStrategy& a, const MixedStrategy& b,
                  const std::string& note) {
    EquilibriumCandidate c;
    c.kind = EquilibriumKind::boundary_mixed;
    c.profile = MixedProfile{a, b};
    c.payoff_a = mixed_payoff(a, b, theta, g, Player::A);
    c.payoff_b = mixed_payoff(a, b, theta, g, Player::B);
    c.note = note;
    out.push_back(std::move(c));
  };

  if (g.t + g.s > g.r + g.p) {
    const double thr = 2.0 * (g.p - g.s) / d;
    if (s2 <= thr)
      push(xy, xy, "valid while sin^2(theta) <= " + std::to_string(thr));
    if (s2 >= thr)
      push(iz, xy,
           "asymmetric pair, valid once sin^2(theta) >= " + std::to_string(thr));
  } else {
    push(xy, xy, "valid for every theta");
    const double thr = 2.0 * (g.t - g.r) / d;
    if (s2 >= thr)
      push(iz, iz, "valid once sin^2(theta) >= " + std::to_string(thr));
  }
  return out;
}

}  // namespace qpd
