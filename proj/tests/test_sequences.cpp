#include <gtest/gtest.h>

#include <random>

#include <bergman_lab/sequences.hpp>

#include "oracles.hpp"

using namespace bergman_lab;
using std::numbers::pi;

namespace {

const Domain ball2 = Domain::unit_ball(2);
const Domain bidisc = Domain::polydisc({1, 1});
const auto strat = QuadratureSpec::stratified(200000, 31, 32);

}  // namespace

TEST(PrincipalPower, Values) {
  EXPECT_EQ(principal_power(1.0, 0.7), Complex(1.0));
  EXPECT_NEAR(std::abs(principal_power(4.0, 0.5) - 0.5), 0.0, 1e-15);
  EXPECT_LT(std::abs(principal_power(Complex(0, 1), 1.0) - 1.0 / Complex(0, 1)), 1e-15);
  EXPECT_THROW(principal_power(-1.0, 0.5), branch_cut_error);
  EXPECT_THROW(principal_power(0.0, 0.5), branch_cut_error);
  EXPECT_NO_THROW(principal_power(Complex(-1.0, 1e-300), 0.5));
}

TEST(Families, Evaluation) {
  const auto f0 = make_f(0.0, ball2);
  EXPECT_EQ(f0({Complex(0.3, 0.2), 0.1}), Complex(1.0));
  EXPECT_EQ(make_f(0.5, ball2)({0.0, 0.0}), Complex(1.0));
  EXPECT_NEAR(std::abs(make_f(1.0, ball2)({1.0 - 1e-4, 0.0})), 1e4, 1e-6);
  const auto shifted = ball2.translated({1.0, 0.0});
  EXPECT_EQ(make_g(0.0, shifted)({0.5, 0.0}), Complex(1.0));
  EXPECT_NEAR(std::abs(make_g(0.5, shifted)({1.0, 0.0}) - 1.0), 0.0, 1e-15);
  EXPECT_THROW(make_g(0.5, ball2), domain_error);
  EXPECT_THROW(make_f(0.5, Domain::unit_ball(2).translated({0.5, 0.0})), domain_error);
  EXPECT_THROW(make_f(2.5, ball2), domain_error);
}

TEST(Families, GOnShiftedBallIsFPulledBack) {
  const auto shifted = ball2.translated({1.0, 0.0});
  const auto g = make_g(0.7, shifted);
  const auto f = make_f(0.7, ball2);
  std::mt19937_64 rng(4);
  for (const auto& w : sample_interior(ball2, 100, 6)) {
    // z1 -> 1 - z1 takes the unit ball onto the shifted ball.
    const ComplexPoint z{1.0 - w[0], w[1]};
    EXPECT_NEAR(std::abs(g(z)), std::abs(f(w)), 1e-12);
  }
}

TEST(Normalize, ConstantMembers) {
  const auto q = QuadratureSpec::monte_carlo(10000, 1);
  const auto b = normalize(TestFamilySpec::from_beta(FamilyKind::F, 0.0, ball2), q);
  EXPECT_NEAR(*b.alpha, std::sqrt(2 / (pi * pi)), 1e-12);
  const auto p = normalize(TestFamilySpec::from_beta(FamilyKind::F, 0.0, bidisc), q);
  EXPECT_NEAR(*p.alpha, 1 / pi, 1e-12);
  EXPECT_THROW(TestFamilySpec::from_beta(FamilyKind::F, 0.5, ball2).normalized(), normalization_error);
}

TEST(Normalize, BallAtBetaOneIsFinite) {
  const auto s = normalize(TestFamilySpec::from_beta(FamilyKind::F, 1.0, ball2), strat);
  // Reduced 1-D integral over |1 - z1| = t with the z2-fiber area.
  const double reduced = oracle::integrate_1d([](double t) { return std::pow(t, -1.0) * oracle::ball_shell_weight(t); },
                                              1e-12, 2.0);
  EXPECT_NEAR(reduced, pi * pi, 1e-6);
  EXPECT_NEAR(s.norm * s.norm, reduced, 3 * 2 * s.norm * s.norm_std_error);
}

TEST(Normalize, DivergentMemberThrows) {
  EXPECT_THROW(normalize(TestFamilySpec::from_beta(FamilyKind::F, 1.2, bidisc), strat), normalization_error);
}

TEST(Normalize, AlphaMatchesGammaOracle) {
  for (int j : {2, 4, 8}) {
    const auto s = normalize(TestFamilySpec::from_index(FamilyKind::F, j, bidisc), strat);
    const double want = 1.0 / std::sqrt(oracle::polydisc_pole_norm_sq(beta_from_index(j)));
    EXPECT_NEAR(*s.alpha, want, 4 * s.alpha.value() * s.norm_std_error / s.norm) << j;
  }
}

TEST(WeakNull, SingletonIsInconclusive) {
  const auto rep = weak_null_report(FamilyKind::F, ball2, {1}, 0.2, QuadratureSpec::stratified(20000, 2, 16), 500);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_NEAR(rep.entries[0].sup_compact, rep.entries[0].alpha, 1e-15);
  EXPECT_FALSE(rep.weak_null.has_value());
}

TEST(WeakNull, BallHasPositiveLimit) {
  const auto rep = weak_null_report(FamilyKind::F, ball2, {2, 4, 8, 16}, 0.2, strat, 2000);
  ASSERT_TRUE(rep.weak_null.has_value());
  EXPECT_FALSE(*rep.weak_null);
  ASSERT_TRUE(rep.alpha_limit.has_value());
  EXPECT_NEAR(*rep.alpha_limit, 1 / pi, 0.01);
  for (const auto& e : rep.entries) {
    EXPECT_NEAR(e.alpha, 1 / std::sqrt(oracle::ball_pole_norm_sq(e.beta)), 4 * e.alpha_std_error);
    EXPECT_NEAR(e.norm, 1.0, 3 * e.norm_std_error);
  }
}

TEST(WeakNull, PolydiscAlphaDecreasesToZero) {
  const auto rep = weak_null_report(FamilyKind::F, bidisc, {2, 4, 8, 16}, 0.2, strat, 2000);
  EXPECT_TRUE(rep.alpha_decreasing);
  ASSERT_TRUE(rep.weak_null.has_value());
  EXPECT_TRUE(*rep.weak_null);
  EXPECT_FALSE(rep.alpha_limit.has_value());
}

TEST(Blowup, GridAndOracle) {
  std::vector<double> grid;
  for (int i = 5; i <= 14; ++i) grid.push_back(i / 10.0);
  const auto p = blowup_threshold(bidisc, grid, strat);
  ASSERT_TRUE(p.beta_star.has_value());
  EXPECT_NEAR(*p.beta_star, 1.0, 0.1);
  EXPECT_NEAR(*p.beta_star, oracle::shell_beta_star(false, grid), 1e-12);
  grid.push_back(1.5);
  grid.push_back(1.6);
  const auto b = blowup_threshold(ball2, grid, strat);
  ASSERT_TRUE(b.beta_star.has_value());
  EXPECT_NEAR(*b.beta_star, 1.5, 0.1);
  EXPECT_NEAR(*b.beta_star, oracle::shell_beta_star(true, grid), 1e-12);
}

TEST(Blowup, ZeroExponentGivesVolume) {
  const auto r = blowup_threshold(ball2, {0.0}, strat);
  EXPECT_FALSE(r.curve[0].divergent);
  EXPECT_NEAR(r.curve[0].norm_sq, pi * pi / 2, 3 * r.curve[0].std_error + 1e-12);
  EXPECT_FALSE(r.beta_star.has_value());
  EXPECT_THROW(blowup_threshold(ball2, {0.5, 0.4}, strat), domain_error);
  EXPECT_THROW(blowup_threshold(ball2, {}, strat), domain_error);
}

TEST(Oracle, ShellSumMatchesGamma) {
  for (double beta : {0.2, 0.5, 0.8}) {
    EXPECT_NEAR(oracle::shell_sum(false, beta), oracle::polydisc_pole_norm_sq(beta), 1e-6 * oracle::polydisc_pole_norm_sq(beta));
  }
  for (double beta : {0.5, 1.0, 1.3}) {
    EXPECT_NEAR(oracle::shell_sum(true, beta), oracle::ball_pole_norm_sq(beta), 1e-6 * oracle::ball_pole_norm_sq(beta));
  }
}

TEST(Invariants, PrincipalPowerModulus) {
  std::mt19937_64 g(70);
  std::uniform_real_distribution<double> u(-3, 3), b(0, 2);
  for (int i = 0; i < 1000; ++i) {
    const Complex w(u(g), u(g));
    const double beta = b(g);
    EXPECT_NEAR(std::abs(principal_power(w, beta)), std::pow(std::abs(w), -beta),
                1e-12 * std::max(1.0, std::pow(std::abs(w), -beta)));
  }
}

TEST(Invariants, NormCurveNondecreasing) {
  const auto r = blowup_threshold(ball2, {0.0, 0.3, 0.6, 0.9, 1.2}, strat);
  for (std::size_t i = 1; i < r.curve.size(); ++i) {
    const auto& a = r.curve[i - 1];
    const auto& c = r.curve[i];
    EXPECT_GE(c.norm_sq + 3 * std::hypot(a.std_error, c.std_error), a.norm_sq);
  }
}
