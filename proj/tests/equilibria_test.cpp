// Tests for stage-game equilibrium construction and verification: the
// quadratic-form best response against a sampling oracle, the closed-form
// candidate families, and the sharpness of their validity thresholds.
#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include <qpd/equilibria.hpp>
#include <qpd/rng.hpp>

using namespace qpd;

namespace {

const PayoffParams g5310{5, 3, 1, 0};
const PayoffParams g5420{5, 4, 2, 0};

double theta_for_sin2(double s2) { return std::asin(std::sqrt(s2)); }

}  // namespace

TEST_CASE("payoff is the advertised quadratic form in the own strategy") {
  SplitMix64 rng(2024ULL);
  for (int trial = 0; trial < 100; ++trial) {
    const PureStrategy xb = random_pure_strategy(rng);
    const double theta = half_pi * rng.uniform();
    const Mat4 m = best_response_matrix(xb, theta, g5310);
    for (int k = 0; k < 5; ++k) {
      const PureStrategy x = random_pure_strategy(rng);
      const double via_form = quad_form(x.coeffs(), m, x.coeffs());
      const double direct = pure_payoff(x, xb, theta, g5310, Player::A);
      REQUIRE(via_form == Catch::Approx(direct).margin(1e-10));
    }
  }
}

TEST_CASE("pure best response dominates sampled strategies and is achieved") {
  SplitMix64 rng(77007ULL);
  for (int trial = 0; trial < 60; ++trial) {
    const PureStrategy xb = random_pure_strategy(rng);
    const double theta = half_pi * rng.uniform();
    const BestResponse br = best_response_pure(xb, theta, g5310);
    // the reported optimum is actually attained by the reported strategy
    REQUIRE(pure_payoff(br.argmax, xb, theta, g5310, Player::A) ==
            Catch::Approx(br.value).margin(1e-9));
    // no sampled strategy, nor any bare operator, does better
    for (int k = 0; k < 4; ++k)
      REQUIRE(pure_payoff(PureStrategy::from_pauli(static_cast<Pauli>(k)), xb,
                          theta, g5310, Player::A) <= br.value + 1e-9);
    for (int k = 0; k < 100; ++k)
      REQUIRE(pure_payoff(random_pure_strategy(rng), xb, theta, g5310,
                          Player::A) <= br.value + 1e-9);
  }
}

TEST_CASE("at maximal coupling every strategy can be fully countered") {
  SplitMix64 rng(90210ULL);
  for (int trial = 0; trial < 200; ++trial) {
    const PureStrategy xb = random_pure_strategy(rng);
    const PureStrategy ctr = counter_strategy_maximal(xb);
    REQUIRE(pure_payoff(ctr, xb, half_pi, g5310, Player::A) ==
            Catch::Approx(5.0).margin(1e-10));
    REQUIRE(best_response_pure(xb, half_pi, g5310).value ==
            Catch::Approx(5.0).margin(1e-9));
  }
}

TEST_CASE("defect-defect is an equilibrium only without coupling") {
  const EquilibriumCandidate c = classical_equilibrium(0.0, g5310);
  REQUIRE(c.kind == EquilibriumKind::classical_defect);
  REQUIRE(c.payoff_a == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(c.payoff_b == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(verify_candidate(c, 0.0, g5310));
  REQUIRE_THROWS_AS(classical_equilibrium(0.2, g5310), NoEquilibriumError);

  // the whole defect plane is an equilibrium family at theta = 0
  SplitMix64 rng(3ULL);
  for (int trial = 0; trial < 20; ++trial) {
    const double u = 2.0 * pi * rng.uniform(), v = 2.0 * pi * rng.uniform();
    const PureStrategy xa(0.0, std::cos(u), std::sin(u), 0.0);
    const PureStrategy xb(0.0, std::cos(v), std::sin(v), 0.0);
    REQUIRE(verify_pure_equilibrium(xa, xb, 0.0, g5310));
  }
  // ...but (I, I) mutual cooperation never is
  REQUIRE_FALSE(verify_pure_equilibrium(PureStrategy::from_pauli(Pauli::I),
                                        PureStrategy::from_pauli(Pauli::I),
                                        0.0, g5310));
}

TEST_CASE("defect-axis family is valid exactly up to its coupling threshold") {
  // for (5,3,1,0) the family survives while sin^2(theta) <= 1/3
  for (double phi : {0.0, 0.4, 1.1}) {
    for (double s2 : {0.0, 0.15, 0.30}) {
      const double theta = theta_for_sin2(s2);
      const EquilibriumCandidate c = pure_equilibrium_family(phi, theta, g5310);
      REQUIRE(c.kind == EquilibriumKind::pure_family);
      const double want = 3.0 * s2 + 1.0 * (1.0 - s2);  // r sin^2 + p cos^2
      REQUIRE(c.payoff_a == Catch::Approx(want).margin(1e-10));
      REQUIRE(c.payoff_b == Catch::Approx(want).margin(1e-10));
      REQUIRE(verify_candidate(c, theta, g5310));
    }
    REQUIRE_THROWS_AS(pure_equilibrium_family(phi, theta_for_sin2(0.4), g5310),
                      NoEquilibriumError);
  }
  // beyond the threshold the same profile genuinely admits a deviation
  const double theta_hi = theta_for_sin2(0.4);
  const PureStrategy xa(0.0, std::cos(0.4), std::sin(0.4), 0.0);
  const PureStrategy xb(0.0, std::sin(0.4), std::cos(0.4), 0.0);
  REQUIRE_FALSE(verify_pure_equilibrium(xa, xb, theta_hi, g5310));
}

TEST_CASE("interior equalizer exists on its advertised coupling range") {
  // (5,3,1,0): probability on I equals (3 sin^2 - 2)/4, needs sin^2 >= 2/3
  REQUIRE_FALSE(interior_mixed_equilibrium(0.0, g5310).has_value());
  REQUIRE_FALSE(interior_mixed_equilibrium(theta_for_sin2(0.5), g5310)
                    .has_value());

  const auto mid = interior_mixed_equilibrium(theta_for_sin2(0.8), g5310);
  REQUIRE(mid.has_value());
  const MixedProfile& mp = std::get<MixedProfile>(mid->profile);
  REQUIRE(mp.a.prob[0] == Catch::Approx(0.1).margin(1e-12));
  REQUIRE(mp.a.prob[1] == Catch::Approx(0.4).margin(1e-12));
  REQUIRE(mp.a.prob[2] == Catch::Approx(0.4).margin(1e-12));
  REQUIRE(mp.a.prob[3] == Catch::Approx(0.1).margin(1e-12));
  REQUIRE(verify_candidate(*mid, theta_for_sin2(0.8), g5310));

  const auto top = interior_mixed_equilibrium(half_pi, g5310);
  REQUIRE(top.has_value());
  const MixedProfile& tp = std::get<MixedProfile>(top->profile);
  for (int k = 0; k < 4; ++k)
    REQUIRE(tp.a.prob[k] == Catch::Approx(0.25).margin(1e-12));
  REQUIRE(verify_candidate(*top, half_pi, g5310));
}

TEST_CASE("interior equalizer makes the opponent exactly indifferent") {
  const double theta = theta_for_sin2(0.75);
  const auto c = interior_mixed_equilibrium(theta, g5310);
  REQUIRE(c.has_value());
  const MixedStrategy& star = std::get<MixedProfile>(c->profile).a;
  const Mat4 m = mixed_payoff_matrix(g5310, theta);
  const Vec4 per_op = mat_vec(m, star.prob);
  for (int k = 1; k < 4; ++k)
    REQUIRE(per_op[k] == Catch::Approx(per_op[0]).margin(1e-10));
}

TEST_CASE("interior equalizer handles degenerate and reversed orderings") {
  // t + s = r + p kills the denominator: no interior candidate at any theta
  const PayoffParams balanced{5, 4, 2, 1};
  for (double s2 : {0.0, 0.5, 1.0})
    REQUIRE_FALSE(
        interior_mixed_equilibrium(theta_for_sin2(s2), balanced).has_value());

  // t + s < r + p: negative component at theta = 0, uniform at pi/2
  REQUIRE_FALSE(interior_mixed_equilibrium(0.0, g5420).has_value());
  const auto top = interior_mixed_equilibrium(half_pi, g5420);
  REQUIRE(top.has_value());
  const MixedStrategy& star = std::get<MixedProfile>(top->profile).a;
  for (int k = 0; k < 4; ++k)
    REQUIRE(star.prob[k] == Catch::Approx(0.25).margin(1e-12));
  REQUIRE(verify_candidate(*top, half_pi, g5420));
}

TEST_CASE("half-half equilibria switch branches at the advertised threshold") {
  // (5,3,1,0) has t + s > r + p, threshold sin^2 = 2(p-s)/(t-r+p-s) = 2/3
  {
    const double theta = theta_for_sin2(0.5);
    const auto cands = boundary_mixed_equilibria(theta, g5310);
    REQUIRE(cands.size() == 1);
    const MixedProfile& mp = std::get<MixedProfile>(cands[0].profile);
    REQUIRE(mp.a.prob[1] == Catch::Approx(0.5));  // XY vs XY
    REQUIRE(mp.b.prob[1] == Catch::Approx(0.5));
    const BarredParams b = barred(g5310, theta);
    REQUIRE(cands[0].payoff_a ==
            Catch::Approx(0.5 * (g5310.p + b.p_bar)).margin(1e-12));
    REQUIRE(verify_candidate(cands[0], theta, g5310));
  }
  {
    const double theta = theta_for_sin2(0.8);
    const auto cands = boundary_mixed_equilibria(theta, g5310);
    REQUIRE(cands.size() == 1);
    const MixedProfile& mp = std::get<MixedProfile>(cands[0].profile);
    REQUIRE(mp.a.prob[0] == Catch::Approx(0.5));  // IZ vs XY
    REQUIRE(mp.b.prob[1] == Catch::Approx(0.5));
    REQUIRE(verify_candidate(cands[0], theta, g5310));
  }
  {
    // both families are weak equilibria exactly at the threshold
    const auto cands = boundary_mixed_equilibria(theta_for_sin2(2.0 / 3.0),
                                                 g5310);
    REQUIRE(cands.size() == 2);
    for (const auto& c : cands)
      REQUIRE(verify_candidate(c, theta_for_sin2(2.0 / 3.0), g5310));
  }
}

TEST_CASE("asymmetric pair at maximal coupling pays both players 2.5") {
  const auto cands = boundary_mixed_equilibria(half_pi, g5310);
  REQUIRE(cands.size() == 1);
  REQUIRE(cands[0].payoff_a == Catch::Approx(2.5).margin(1e-12));
  REQUIRE(cands[0].payoff_b == Catch::Approx(2.5).margin(1e-12));
  REQUIRE(verify_candidate(cands[0], half_pi, g5310));
}

TEST_CASE("half-half equilibria for the reversed ordering keep XY everywhere") {
  // (5,4,2,0) has t + s < r + p; IZ joins once sin^2 >= 2(t-r)/D = 2/3
  {
    const auto cands = boundary_mixed_equilibria(0.0, g5420);
    REQUIRE(cands.size() == 1);
    REQUIRE(std::get<MixedProfile>(cands[0].profile).a.prob[1] ==
            Catch::Approx(0.5));
    REQUIRE(verify_candidate(cands[0], 0.0, g5420));
  }
  {
    const double theta = theta_for_sin2(0.8);
    const auto cands = boundary_mixed_equilibria(theta, g5420);
    REQUIRE(cands.size() == 2);
    for (const auto& c : cands) REQUIRE(verify_candidate(c, theta, g5420));
    const BarredParams b = barred(g5420, theta);
    REQUIRE(cands[1].payoff_a ==
            Catch::Approx(0.5 * (g5420.r + b.r_bar)).margin(1e-12));
  }
  {
    const auto cands = boundary_mixed_equilibria(half_pi, g5420);
    REQUIRE(cands.size() == 2);
    REQUIRE(cands[1].payoff_a == Catch::Approx(3.0).margin(1e-12));
    REQUIRE(cands[1].payoff_b == Catch::Approx(3.0).margin(1e-12));
  }
}

TEST_CASE("mixed verification rejects profiles with profitable deviations") {
  REQUIRE_FALSE(verify_mixed_equilibrium(MixedStrategy::from_pauli(Pauli::I),
                                         MixedStrategy::from_pauli(Pauli::I),
                                         0.0, g5310));
  // XY vs XY stops verifying above its threshold
  REQUIRE_FALSE(verify_mixed_equilibrium(MixedStrategy::half_xy(),
                                         MixedStrategy::half_xy(),
                                         theta_for_sin2(0.8), g5310));
  // IZ vs IZ is no equilibrium at low coupling for (5,4,2,0)
  REQUIRE_FALSE(verify_mixed_equilibrium(MixedStrategy::half_iz(),
                                         MixedStrategy::half_iz(), 0.0,
                                         g5420));
}

TEST_CASE("candidate families verify across a coupling sweep") {
  for (int i = 0; i <= 20; ++i) {
    const double theta = half_pi * i / 20.0;
    for (const PayoffParams& g : {g5310, g5420}) {
      for (const auto& c : boundary_mixed_equilibria(theta, g))
        REQUIRE(verify_candidate(c, theta, g));
      if (const auto c = interior_mixed_equilibrium(theta, g))
        REQUIRE(verify_candidate(*c, theta, g));
      const double s2 = std::sin(theta) * std::sin(theta);
      if (s2 <= g.p / (g.t - g.r + g.p) - 1e-9)
        REQUIRE(verify_candidate(pure_equilibrium_family(0.7, theta, g),
                                 theta, g));
    }
  }
}
