#pragma once
// Two-qubit machinery for the entangled prisoner's dilemma stage game.
//
// Each player commits a single-qubit unitary U = alpha*I + i*(beta*X +
// gamma*Y + delta*Z) with (alpha, beta, gamma, delta) a unit 4-vector; the
// joint state is |psi> = J(theta)^dag (U_A (x) U_B) J(theta) |CC> with the
// entangler J(theta) = cos(theta/2) I(x)I + i sin(theta/2) Y(x)Y. Measuring
// in the computational basis (C = |0>, D = |1>) yields the joint action.
// theta = 0 is the classical game, theta = pi/2 maximal entanglement.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rng.hpp"

namespace qpd {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double half_pi = std::numbers::pi / 2.0;

// Basis order used throughout: |CC>, |CD>, |DC>, |DD>. The first letter is
// Alice's qubit, the second Bob's.
enum class Outcome : int { CC = 0, CD = 1, DC = 2, DD = 3 };

// The four operator "corners" of the strategy sphere: U(I) = I, U(X) = iX,
// U(Y) = iY, U(Z) = iZ.
enum class Pauli : int { I = 0, X = 1, Y = 2, Z = 3 };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::CC: return "CC";
    case Outcome::CD: return "CD";
    case Outcome::DC: return "DC";
    case Outcome::DD: return "DD";
  }
  return "??";
}

inline const char* to_string(Pauli p) {
  switch (p) {
    case Pauli::I: return "I";
    case Pauli::X: return "X";
    case Pauli::Y: return "Y";
    case Pauli::Z: return "Z";
  }
  return "?";
}

inline void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= half_pi))
    throw std::domain_error(
        "entanglement parameter theta must lie in [0, pi/2]; got " +
        std::to_string(theta));
}

// A pure strategy: unit 4-vector of operator coefficients. Global phase is
// irrelevant to payoffs, so this sphere covers every single-qubit unitary.
struct PureStrategy {
  double alpha = 1.0, beta = 0.0, gamma = 0.0, delta = 0.0;

  PureStrategy() = default;

  PureStrategy(double a, double b, double c, double d)
      : alpha(a), beta(b), gamma(c), delta(d) {
    const double n2 = a * a + b * b + c * c + d * d;
    if (std::abs(n2 - 1.0) > 1e-9)
      throw std::domain_error(
          "pure strategy coefficients must form a unit 4-vector; |x|^2 = " +
          std::to_string(n2));
  }

  static PureStrategy from_pauli(Pauli op) {
    switch (op) {
      case Pauli::I: return {1, 0, 0, 0};
      case Pauli::X: return {0, 1, 0, 0};
      case Pauli::Y: return {0, 0, 1, 0};
      case Pauli::Z: return {0, 0, 0, 1};
    }
    return {1, 0, 0, 0};
  }

  static PureStrategy normalized(double a, double b, double c, double d) {
    const double n = std::sqrt(a * a + b * b + c * c + d * d);
    if (n < 1e-12)
      throw std::domain_error("cannot normalize a near-zero strategy vector");
    return {a / n, b / n, c / n, d / n};
  }

  std::array<double, 4> coeffs() const { return {alpha, beta, gamma, delta}; }
};

using CMat2 = std::array<std::array<cplx, 2>, 2>;
using CMat4 = std::array<std::array<cplx, 4>, 4>;

struct TwoQubitState {
  std::array<cplx, 4> amp{};

  static TwoQubitState basis(Outcome o) {
    TwoQubitState s;
    s.amp[static_cast<int>(o)] = 1.0;
    return s;
  }

  double norm_sq() const {
    double n = 0.0;
    for (const cplx& a : amp) n += std::norm(a);
    return n;
  }
};

inline TwoQubitState initial_state() {
  return TwoQubitState::basis(Outcome::CC);
}

// U = alpha*I + i*(beta*X + gamma*Y + delta*Z)
//   = [ alpha + i*delta   gamma + i*beta ]
//     [ -gamma + i*beta   alpha - i*delta ]
inline CMat2 strategy_unitary(const PureStrategy& x) {
  return {{{cplx(x.alpha, x.delta), cplx(x.gamma, x.beta)},
           {cplx(-x.gamma, x.beta), cplx(x.alpha, -x.delta)}}};
}

inline CMat4 kron(const CMat2& a, const CMat2& b) {
  CMat4 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
  return out;
}

// J(theta) = cos(theta/2) I(x)I + i sin(theta/2) Y(x)Y
inline CMat4 entangler(double theta) {
  check_theta(theta);
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  CMat4 j{};
  for (int k = 0; k < 4; ++k) j[k][k] = cplx(c, 0.0);
  // Y(x)Y maps |CC> -> -|DD>, |CD> -> |DC>, |DC> -> |CD>, |DD> -> -|CC>
  j[0][3] = cplx(0.0, -s);
  j[1][2] = cplx(0.0, s);
  j[2][1] = cplx(0.0, s);
  j[3][0] = cplx(0.0, -s);
  return j;
}

inline CMat4 adjoint(const CMat4& m) {
  CMat4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = std::conj(m[j][i]);
  return out;
}

inline TwoQubitState apply_gate(const CMat4& m, const TwoQubitState& v) {
  TwoQubitState out;
  for (int i = 0; i < 4; ++i) {
    cplx acc = 0.0;
    for (int j = 0; j < 4; ++j) acc += m[i][j] * v.amp[j];
    out.amp[i] = acc;
  }
  return out;
}

// |psi> = J^dag (U_A (x) U_B) J |in>
inline TwoQubitState evolve_from(const TwoQubitState& in,
                                 const PureStrategy& xa,
                                 const PureStrategy& xb, double theta) {
  const CMat4 j = entangler(theta);
  const CMat4 u = kron(strategy_unitary(xa), strategy_unitary(xb));
  return apply_gate(adjoint(j), apply_gate(u, apply_gate(j, in)));
}

inline TwoQubitState evolve(const PureStrategy& xa, const PureStrategy& xb,
                            double theta) {
  return evolve_from(initial_state(), xa, xb, theta);
}

// Born-rule probabilities over (CC, CD, DC, DD).
inline std::array<double, 4> outcome_distribution(const TwoQubitState& s) {
  return {std::norm(s.amp[0]), std::norm(s.amp[1]), std::norm(s.amp[2]),
          std::norm(s.amp[3])};
}

// Closed-form outcome probabilities of evolve(xa, xb, theta). Each
// amplitude splits into a real part carrying sin(theta) cross terms and an
// imaginary part damped by cos(theta); probabilities are the two squares.
inline std::array<double, 4> pure_outcome_probabilities(
    const PureStrategy& xa, const PureStrategy& xb, double theta) {
  check_theta(theta);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double aA = xa.alpha, bA = xa.beta, cA = xa.gamma, dA = xa.delta;
  const double aB = xb.alpha, bB = xb.beta, cB = xb.gamma, dB = xb.delta;

  const double cc_re = aA * aB - dA * dB + st * (bA * cB + cA * bB);
  const double cc_im = ct * (aA * dB + dA * aB);
  const double cd_re = cB * aA + bB * dA + st * (dB * cA - aB * bA);
  const double cd_im = ct * (bB * aA - cB * dA);
  const double dc_re = cA * aB + bA * dB + st * (dA * cB - aA * bB);
  const double dc_im = ct * (bA * aB - cA * dB);
  const double dd_re = bA * bB - cA * cB + st * (aA * dB + dA * aB);
  const double dd_im = ct * (bA * cB + cA * bB);

  return {cc_re * cc_re + cc_im * cc_im, cd_re * cd_re + cd_im * cd_im,
          dc_re * dc_re + dc_im * dc_im, dd_re * dd_re + dd_im * dd_im};
}

inline Outcome sample_outcome(const std::array<double, 4>& dist,
                              SplitMix64& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += dist[k];
    if (u < acc) return static_cast<Outcome>(k);
  }
  return Outcome::DD;
}

inline PureStrategy random_pure_strategy(SplitMix64& rng) {
  for (;;) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal(),
                 d = rng.normal();
    const double n = std::sqrt(a * a + b * b + c * c + d * d);
    if (n > 1e-6) return PureStrategy::normalized(a, b, c, d);
  }
}

}  // namespace qpd
