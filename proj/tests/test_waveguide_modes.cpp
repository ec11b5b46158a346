#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wgqed/waveguide_modes.hpp"

using namespace wgqed;

namespace {

// Reference values evaluated independently at 30 digits (mpmath) for
// a = 1, b = 1/2, omega_a = (Omega_11 + Omega_31) / 2, g'_11 = 0.08 Omega_11.
constexpr double kOmega11 = 7.0248147310407263931563746432;
constexpr double kOmega21 = 8.88576587631673249403176198012;
constexpr double kOmega31 = 11.3271733991389776925330296252;
constexpr double kOmegaA = 9.17599406508985204284470213421;
constexpr double kK10 = 5.90346043241736267966601760263;
constexpr double kK20 = 2.28954839954287030967884383603;
constexpr double kV1 = 0.643359225228482701617380961625;
constexpr double kV2 = 0.249515026197921900558085330667;
constexpr double kGamma11 = 1.54221905097766168142025367527;
constexpr double kGamma212 = 6.36242790753646623815340055582;

const CrossSection kSection{1.0, 0.5};

AtomSpec atom(double x, double y, double z = 0.0) { return AtomSpec{{x, y, z}, kOmegaA}; }

}  // namespace

TEST(CutoffFrequency, MatchesClosedForms) {
  EXPECT_NEAR(cutoff_frequency(1, 1, kSection), std::numbers::pi * std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(cutoff_frequency(2, 1, kSection), kOmega21, 1e-13);
  EXPECT_NEAR(cutoff_frequency(3, 1, kSection), kOmega31, 1e-13);
  // Six-decimal reference values.
  EXPECT_NEAR(cutoff_frequency(1, 1, kSection), 7.024815, 1e-6);
  EXPECT_NEAR(cutoff_frequency(2, 1, kSection), 8.885766, 1e-6);
  EXPECT_NEAR(cutoff_frequency(3, 1, kSection), 11.327173, 1e-6);
}

TEST(CutoffFrequency, RejectsNonPositiveIndices) {
  EXPECT_THROW(cutoff_frequency(0, 1, kSection), Error);
  EXPECT_THROW(cutoff_frequency(1, 0, kSection), Error);
  EXPECT_THROW(cutoff_frequency(1, 1, CrossSection{0.0, 1.0}), Error);
}

TEST(Dispersion, Examples) {
  const TMMode tm11 = make_mode(1, 1, kSection);
  EXPECT_DOUBLE_EQ(dispersion(tm11, 0.0), tm11.cutoff);
  EXPECT_NEAR(dispersion(tm11, kK10), kOmegaA, 1e-13);
  EXPECT_DOUBLE_EQ(dispersion(TMMode{1, 1, 0.0}, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(dispersion(tm11, -3.0), dispersion(tm11, 3.0));
}

TEST(ResonantWavevector, Examples) {
  EXPECT_NEAR(resonant_wavevector(make_mode(1, 1, kSection), kOmegaA), kK10, 1e-13);
  EXPECT_NEAR(resonant_wavevector(make_mode(2, 1, kSection), kOmegaA), kK20, 1e-13);
  try {
    resonant_wavevector(make_mode(3, 1, kSection), kOmegaA);
    FAIL() << "TM31 must be evanescent";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::propagation);
    EXPECT_NE(std::string(e.what()).find("mode not propagating"), std::string::npos);
  }
}

TEST(GroupVelocity, Examples) {
  EXPECT_NEAR(group_velocity(make_mode(1, 1, kSection), kOmegaA), kV1, 1e-14);
  EXPECT_NEAR(group_velocity(make_mode(2, 1, kSection), kOmegaA), kV2, 1e-14);
  EXPECT_NEAR(group_velocity(TMMode{1, 1, 1e-12}, 3.0), speed_of_light, 1e-15);
  EXPECT_THROW(group_velocity(make_mode(3, 1, kSection), kOmegaA), Error);
}

TEST(GroupVelocity, ChainRuleAndInversionHoldForRandomModes) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> cut(0.1, 20.0);
  std::uniform_real_distribution<double> above(1.0001, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    const TMMode mode{1, 1, cut(rng)};
    const double w = mode.cutoff * above(rng);
    const double k = resonant_wavevector(mode, w);
    const double v = group_velocity(mode, w);
    EXPECT_NEAR(v * w, speed_of_light * speed_of_light * k, 1e-13 * w * k);
    EXPECT_NEAR(dispersion(mode, k), w, 1e-12 * w);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, speed_of_light);
  }
}

TEST(CouplingStrength, Examples) {
  const TMMode tm11 = make_mode(1, 1, kSection);
  const TMMode tm21 = make_mode(2, 1, kSection);
  const Coupling centered = coupling_strength(tm11, kSection, atom(0.5, 0.25), 0.08);
  EXPECT_NEAR(centered.renormalized, 0.08 * kOmega11, 1e-15);
  EXPECT_NEAR(centered.renormalized, 0.561985, 1e-6);
  EXPECT_NEAR(centered.raw, centered.renormalized * std::sqrt(kOmegaA), 1e-14);

  EXPECT_EQ(coupling_strength(tm21, kSection, atom(0.5, 0.25), 0.3).raw, 0.0);

  const Coupling shifted = coupling_strength(tm11, kSection, atom(0.75, 0.25), 0.08);
  EXPECT_NEAR(shifted.renormalized, 0.08 * kOmega11 * std::cos(std::numbers::pi / 4.0), 1e-14);
  EXPECT_NEAR(shifted.renormalized, 0.397383, 1e-6);
}

TEST(CouplingStrength, SignIsKept) {
  const TMMode tm21 = make_mode(2, 1, kSection);
  EXPECT_LT(coupling_strength(tm21, kSection, atom(0.75, 0.25), 0.08).renormalized, 0.0);
  EXPECT_GT(coupling_strength(tm21, kSection, atom(0.25, 0.25), 0.08).renormalized, 0.0);
}

TEST(CouplingStrength, VanishesOnNodalPlanes) {
  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= 3; ++n) {
      const TMMode mode = make_mode(m, n, kSection);
      for (int p = 0; p <= m; ++p) {
        const double x = kSection.a * p / m;
        EXPECT_EQ(coupling_strength(mode, kSection, atom(x, 0.1), 0.08).raw, 0.0) << m << n << " x=" << x;
      }
      for (int q = 0; q <= n; ++q) {
        const double y = kSection.b * q / n;
        EXPECT_EQ(coupling_strength(mode, kSection, atom(0.3, y), 0.08).raw, 0.0) << m << n << " y=" << y;
      }
    }
  }
}

TEST(CouplingStrength, RenormalizationRatioIsUniform) {
  const auto modes = propagating_modes(kSection, kOmegaA, default_candidate_modes());
  const CouplingTable t = make_coupling_table(modes, kSection, {atom(0.3, 0.2), atom(0.8, 0.4, 1.0)}, 0.05);
  for (const auto& row : t.entries)
    for (const auto& c : row) {
      if (c.raw != 0.0) {
        EXPECT_NEAR(c.renormalized / c.raw, 1.0 / std::sqrt(kOmegaA), 1e-15);
      }
    }
}

TEST(CouplingStrength, RejectsAtomOutsideCrossSection) {
  const TMMode tm11 = make_mode(1, 1, kSection);
  try {
    coupling_strength(tm11, kSection, atom(0.5, 0.6), 0.08);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::geometry);
  }
}

TEST(PropagatingModes, Examples) {
  const auto modes = propagating_modes(kSection, kOmegaA, {{3, 1}, {1, 1}, {2, 1}});
  ASSERT_EQ(modes.size(), 2u);
  EXPECT_TRUE(modes[0].is(1, 1));
  EXPECT_TRUE(modes[1].is(2, 1));
  EXPECT_TRUE(propagating_modes(kSection, 1.0, default_candidate_modes()).empty());
  const auto only = propagating_modes(kSection, kOmegaA, {{1, 1}});
  ASSERT_EQ(only.size(), 1u);
  EXPECT_TRUE(only[0].is(1, 1));
}

TEST(ChannelRates, CenteredAndOffCenterValues) {
  const auto modes = propagating_modes(kSection, kOmegaA, default_candidate_modes());
  const auto centered = channel_rates(make_coupling_table(modes, kSection, {atom(0.5, 0.25), atom(0.5, 0.25, 2.0)}, 0.08));
  EXPECT_NEAR(centered.gamma11, kGamma11, 1e-13);
  EXPECT_NEAR(centered.gamma11, 1.542268, 1e-4 * 1.542268);  // four-digit reference value
  EXPECT_DOUBLE_EQ(centered.gamma12, centered.gamma11);
  EXPECT_EQ(centered.gamma212, 0.0);

  const auto off = channel_rates(make_coupling_table(modes, kSection, {atom(0.5, 0.25), atom(0.75, 0.25, 2.0)}, 0.08));
  EXPECT_NEAR(off.gamma212, kGamma212, 1e-12);
  EXPECT_NEAR(off.gamma212, 6.362571, 1e-4 * 6.362571);
  EXPECT_NEAR(off.gamma12, kGamma11 / std::sqrt(2.0), 1e-13);
  EXPECT_NEAR(off.gamma22, kGamma11 / 2.0, 1e-13);
  EXPECT_EQ(off.gamma211, 0.0);
}

TEST(ChannelRates, DecoupledSecondAtom) {
  const auto modes = propagating_modes(kSection, kOmegaA, default_candidate_modes());
  const auto r = channel_rates(make_coupling_table(modes, kSection, {atom(0.5, 0.25), atom(1.0, 0.25)}, 0.08));
  EXPECT_EQ(r.gamma12, 0.0);
  EXPECT_EQ(r.gamma22, 0.0);
}

TEST(ChannelRates, GeometricMeanIdentity) {
  const auto modes = propagating_modes(kSection, kOmegaA, default_candidate_modes());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(0.0, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = channel_rates(
        make_coupling_table(modes, kSection, {atom(ux(rng), uy(rng)), atom(ux(rng), uy(rng), 1.0)}, 0.08));
    EXPECT_NEAR(r.gamma12 * r.gamma12, r.gamma11 * r.gamma22, 1e-13 * std::max(1.0, r.gamma11 * r.gamma22));
  }
}

TEST(CollectiveRates, CenteredSeparationTwelve) {
  const auto modes = propagating_modes(kSection, kOmegaA, default_candidate_modes());
  const double d = 12.0 / kK10;
  const auto table = make_coupling_table(modes, kSection, {atom(0.5, 0.25, 0.0), atom(0.5, 0.25, d)}, 0.08);
  const auto c = collective_rates(table, 0.0, d, ExchangeForm::centered);
  EXPECT_NEAR(c.Gamma[0][1], 2.0 * kGamma11 * std::cos(12.0), 1e-12);
  EXPECT_NEAR(c.U[0][1], 2.0 * kGamma11 * std::sin(12.0), 1e-12);
  EXPECT_NEAR(c.Gamma[0][1], 2.602938, 1e-4 * 2.602938);
  EXPECT_NEAR(c.U[0][1], -1.655054, 1e-4 * 1.655054);
  EXPECT_NEAR(c.Gamma[0][0], 2.0 * kGamma11, 1e-12);
  EXPECT_EQ(c.U[0][0], 0.0);
  EXPECT_EQ(c.A[0][1], c.A[1][0]);
  EXPECT_EQ(c.A[0][0].imag(), 0.0);
}

TEST(CollectiveRates, PerpendicularIsReal) {
  const auto modes = propagating_modes(kSection, kOmegaA, default_candidate_modes());
  const auto table = make_coupling_table(modes, kSection, {atom(0.5, 0.25), atom(0.5, 0.25)}, 0.08);
  const auto c = collective_rates(table, 0.0, 0.0, ExchangeForm::perpendicular);
  EXPECT_NEAR(c.Gamma[0][1], 2.0 * kGamma11, 1e-12);
  EXPECT_NEAR(c.Gamma[0][0], 2.0 * kGamma11, 1e-12);
  EXPECT_EQ(c.U[0][1], 0.0);
}

TEST(CollectiveRates, OffCenterUsesHalfExchange) {
  const auto modes = propagating_modes(kSection, kOmegaA, default_candidate_modes());
  const double d = 12.0 / kK10;
  const auto table = make_coupling_table(modes, kSection, {atom(0.5, 0.25), atom(0.75, 0.25, d)}, 0.08);
  const auto c = collective_rates(table, 0.0, d, ExchangeForm::off_center);
  const double gamma12 = kGamma11 / std::sqrt(2.0);
  EXPECT_NEAR(c.U[0][1], gamma12 * std::sin(12.0), 1e-12);
  EXPECT_NEAR(c.Gamma[0][1], 2.0 * gamma12 * std::cos(12.0), 1e-12);
}

TEST(CollectiveRates, ModulusIndependentOfPositions) {
  const auto modes = propagating_modes(kSection, kOmegaA, default_candidate_modes());
  const auto table = make_coupling_table(modes, kSection, {atom(0.5, 0.25), atom(0.6, 0.2, 1.0)}, 0.08);
  const double ref = std::abs(collective_rates(table, 0.0, 0.0, ExchangeForm::centered).A[0][1]);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uz(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = collective_rates(table, uz(rng), uz(rng), ExchangeForm::centered);
    EXPECT_NEAR(std::abs(c.A[0][1]), ref, 1e-13);
    EXPECT_NEAR(std::hypot(c.Gamma[0][1], c.U[0][1]), 2.0 * ref, 1e-12);
  }
}
