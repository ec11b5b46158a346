#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wgqed/analysis.hpp"

using namespace wgqed;

TEST(DarkState, Examples) {
  const DarkState sym = dark_state(2.0, 2.0);
  EXPECT_NEAR(sym.c1, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sym.c2, -1.0 / std::sqrt(2.0), 1e-15);

  const DarkState bare = dark_state(1.3, 0.0);
  EXPECT_EQ(bare.c1, 0.0);
  EXPECT_EQ(bare.c2, -1.0);

  const DarkState quarter = dark_state(1.0, 1.0 / std::sqrt(2.0));
  EXPECT_NEAR(quarter.c1, 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(quarter.c2, -std::sqrt(2.0) / std::sqrt(3.0), 1e-15);
}

TEST(DarkState, AnnihilatedAndNormalized) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double g11 = u(rng), g12 = u(rng);
    const DarkState d = dark_state(g11, g12);
    EXPECT_NEAR(d.c1 * d.c1 + d.c2 * d.c2, 1.0, 1e-14);
    EXPECT_NEAR(g11 * d.c1 + g12 * d.c2, 0.0, 1e-12);
    const double s = std::exp(u(rng));
    const DarkState scaled = dark_state(s * g11, s * g12);
    EXPECT_NEAR(std::abs(scaled.c1), std::abs(d.c1), 1e-12);
    EXPECT_NEAR(std::abs(scaled.c2), std::abs(d.c2), 1e-12);
  }
}

TEST(DarkState, RejectsZeroCouplings) { EXPECT_THROW(dark_state(0.0, 0.0), Error); }

TEST(SteadyRatio, Examples) {
  const SteadyPopulations q = steady_ratio(dark_state(1.0, 1.0 / std::sqrt(2.0)), 1.0, 0.0);
  EXPECT_NEAR(q.p1, 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(q.p2, 2.0 / 9.0, 1e-15);
  ASSERT_TRUE(q.ratio.has_value());
  EXPECT_NEAR(*q.ratio, 0.5, 1e-14);

  const SteadyPopulations s = steady_ratio(dark_state(1.0, 1.0), 1.0, 0.0);
  EXPECT_NEAR(s.p1, 0.25, 1e-15);
  EXPECT_NEAR(s.p2, 0.25, 1e-15);
  EXPECT_NEAR(*s.ratio, 1.0, 1e-14);
}

TEST(SteadyRatio, DarkStartDoesNotDecay) {
  const DarkState d = dark_state(1.0, 0.4);
  const SteadyPopulations s = steady_ratio(d, d.c1, d.c2);
  EXPECT_NEAR(s.p1, d.c1 * d.c1, 1e-15);
  EXPECT_NEAR(s.p2, d.c2 * d.c2, 1e-15);
  EXPECT_NEAR(*s.ratio, 0.16, 1e-14);
}

TEST(SteadyRatio, FollowsCosineSquaredLaw) {
  const double b = 0.5;
  for (double dy : {b / 8.0, b / 4.0, 3.0 * b / 8.0}) {
    // atom 2 at y = b/2 + dy: g12 / g11 = sin((b/2 + dy) pi / b) = cos(dy pi / b)
    const double ratio_g = std::sin((0.5 * b + dy) * std::numbers::pi / b);
    const SteadyPopulations s = steady_ratio(dark_state(1.0, ratio_g), 1.0, 0.0);
    EXPECT_NEAR(*s.ratio, std::pow(std::cos(dy * std::numbers::pi / b), 2), 1e-12);
  }
}

TEST(SteadyRatio, UndefinedWhenSecondAtomEmpty) {
  const SteadyPopulations s = steady_ratio(dark_state(0.0, 1.0), 1.0, 0.0);
  EXPECT_EQ(s.p2, 0.0);
  EXPECT_FALSE(s.ratio.has_value());
  EXPECT_THROW(steady_ratio(dark_state(1.0, 1.0), 1.0, 1.0), Error);
}

TEST(CurveDistance, IdenticalCurves) {
  const std::vector<double> t = {0.0, 0.5, 1.0};
  const std::vector<double> v = {1.0, 0.3, 0.2};
  const CurveDistance d = curve_distance(t, v, t, v);
  EXPECT_EQ(d.sup, 0.0);
  EXPECT_EQ(d.l2, 0.0);
}

TEST(CurveDistance, ConstantOffset) {
  const auto t = uniform_grid(2.0, 21);
  std::vector<double> a(t.size(), 1.0), b(t.size(), 0.75);
  const CurveDistance d = curve_distance(t, a, t, b);
  EXPECT_DOUBLE_EQ(d.sup, 0.25);
  EXPECT_NEAR(d.l2, 0.25 * std::sqrt(2.0), 1e-14);
}

TEST(CurveDistance, ResamplesOntoTheFirstGrid) {
  const auto ta = uniform_grid(1.0, 11);
  const auto tb = uniform_grid(1.0, 4);
  std::vector<double> a, b;
  for (double t : ta) a.push_back(2.0 * t);
  for (double t : tb) b.push_back(2.0 * t);
  EXPECT_NEAR(curve_distance(ta, a, tb, b).sup, 0.0, 1e-15);
}

TEST(CurveDistance, MetricSpotChecks) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto t = uniform_grid(3.0, 50);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(t.size()), b(t.size()), c(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) a[k] = u(rng), b[k] = u(rng), c[k] = u(rng);
    const auto ab = curve_distance(t, a, t, b), ba = curve_distance(t, b, t, a);
    const auto ac = curve_distance(t, a, t, c), cb = curve_distance(t, c, t, b);
    EXPECT_EQ(ab.sup, ba.sup);
    EXPECT_NEAR(ab.l2, ba.l2, 1e-15);
    EXPECT_LE(ab.sup, ac.sup + cb.sup + 1e-15);
    EXPECT_LE(ab.l2, ac.l2 + cb.l2 + 1e-15);
  }
}

TEST(CurveDistance, RejectsDisjointRanges) {
  const std::vector<double> ta = {0.0, 1.0}, tb = {2.0, 3.0}, v = {0.0, 0.0};
  EXPECT_THROW(curve_distance(ta, v, tb, v), Error);
}

TEST(SteadyValue, FlatTail) {
  std::vector<double> v(100, 0.5);
  v[0] = 1.0;
  const SteadyEstimate s = steady_value(v);
  EXPECT_DOUBLE_EQ(s.mean, 0.5);
  EXPECT_TRUE(s.flat);
  v.back() = 0.6;
  EXPECT_FALSE(steady_value(v).flat);
}

TEST(Extrema, RevivalDetection) {
  const std::vector<double> decay = {1.0, 0.8, 0.6, 0.6, 0.3};
  EXPECT_TRUE(non_increasing(decay, 0.0));
  EXPECT_FALSE(has_revival(decay));

  const std::vector<double> revival = {1.0, 0.5, 0.2, 0.4, 0.6, 0.3};
  EXPECT_FALSE(non_increasing(revival, 1e-10));
  EXPECT_TRUE(has_revival(revival));
  const auto e = local_extrema(revival);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].index, 2u);
  EXPECT_EQ(e[0].kind, ExtremumKind::minimum);
  EXPECT_EQ(e[1].index, 4u);
  EXPECT_EQ(e[1].kind, ExtremumKind::maximum);

  const std::vector<double> jitter = {1.0, 0.5, 0.5 + 1e-12, 0.4};
  EXPECT_FALSE(has_revival(jitter, 1e-10));
}
