#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wgqed/markovian_dynamics.hpp"
#include "wgqed/retarded_dynamics.hpp"

using namespace wgqed;
using cd = std::complex<double>;

namespace {

LindbladSpec collective(double g11, double g12, double g22, double u12) {
  LindbladSpec s;
  s.omega_a = 9.17599406508985204;
  s.collective_decay << 2.0 * g11, 2.0 * g12, 2.0 * g12, 2.0 * g22;
  s.exchange << 0.0, u12, u12, 0.0;
  return s;
}

}  // namespace

TEST(Generator, CoherentOnlyKeepsPopulations) {
  LindbladSpec s;
  s.omega_a = 9.0;
  const Generator gen(s);
  const auto grid = uniform_grid(5.0, 51);
  const MeTrajectory tr = integrate_me(gen, projector(basis::eg), grid);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_NEAR(tr.p1[k], 1.0, 1e-12);
    EXPECT_NEAR(tr.p2[k], 0.0, 1e-12);
  }
}

TEST(Generator, SingleAtomDampingMatchesRetardedDecay) {
  const double gamma = 1.2;
  LindbladSpec s;
  s.omega_a = 9.0;
  s.collective_decay(0, 0) = 2.0 * gamma;
  const Generator gen(s);
  const auto grid = uniform_grid(4.0, 201);
  const MeTrajectory me = integrate_me(gen, projector(basis::eg), grid);

  RetardedSystem r;
  r.self_rate = {gamma, 0.0};
  SolverConfig cfg;
  cfg.samples = 201;
  const Trajectory dde = integrate_retarded(r, {1.0, 0.0}, 4.0, cfg);
  for (std::size_t k = 0; k < me.size(); ++k) {
    EXPECT_NEAR(me.p1[k], std::exp(-2.0 * gamma * grid[k]), 1e-10);
    EXPECT_NEAR(me.p1[k], dde.p1[k], 1e-9);
  }
}

TEST(Generator, ExchangeSwapsExcitation) {
  // Gamma = 0, U12 = U21 = u: the symmetric sum gives H = u (s1+ s2- + h.c.), so P1 = cos^2(u t).
  const double u = 0.8;
  const Generator gen(collective(0.0, 0.0, 0.0, u));
  const auto grid = uniform_grid(10.0, 101);
  const MeTrajectory tr = integrate_me(gen, projector(basis::eg), grid);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_NEAR(tr.p1[k], std::pow(std::cos(u * grid[k]), 2), 1e-9);
    EXPECT_NEAR(tr.p1[k] + tr.p2[k], 1.0, 1e-10);
  }
}

TEST(Generator, DarkStateSpansTheKernel) {
  const double g = 1.5;
  const Generator gen(collective(g, g, g, 0.0));
  const Eigen::Vector4cd dark = (Eigen::Vector4cd() << 0.0, -1.0, 1.0, 0.0).finished() / std::sqrt(2.0);
  const DensityMatrix rho_d = dark * dark.adjoint();
  EXPECT_LE(gen.apply(rho_d).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(gen.apply(projector(basis::gg)).cwiseAbs().maxCoeff(), 1e-12);

  Eigen::ComplexEigenSolver<Superoperator> solver(gen.matrix(), false);
  int zeros = 0, undamped = 0;
  for (int k = 0; k < 16; ++k) {
    const cd ev = solver.eigenvalues()(k);
    if (std::abs(ev) < 1e-9) ++zeros;
    else if (std::abs(ev.real()) < 1e-9) ++undamped;
  }
  // vacuum and dark state; their coherences rotate at omega_a without decay
  EXPECT_EQ(zeros, 2);
  EXPECT_EQ(undamped, 2);
}

TEST(Generator, RungeKuttaAgreesWithMatrixExponential) {
  LindbladSpec s = collective(1.54, 1.0, 0.77, -0.6);
  s.local_decay = {0.0, 3.1};
  const Generator gen(s);
  const DensityMatrix rho0 = state_from_amplitudes(cd(0.6, 0.0), cd(0.0, 0.8));
  const std::vector<double> grid = {0.0, 0.37, 1.0, 2.5};
  const MeTrajectory tr = integrate_me(gen, rho0, grid, {0.01, true});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const DensityMatrix exact = propagate_exact(gen, rho0, grid[k]);
    EXPECT_LE((tr.states[k] - exact).cwiseAbs().maxCoeff(), 1e-10) << grid[k];
  }
}

TEST(Generator, TracePositivityAndNoDoubleExcitation) {
  LindbladSpec s = collective(1.54, -1.2, 0.95, 2.1);
  s.local_decay = {0.4, 6.3};
  const Generator gen(s);
  const MeTrajectory tr = integrate_me(gen, projector(basis::eg), uniform_grid(20.0, 400));
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_NEAR(tr.trace[k], 1.0, 1e-10);
    EXPECT_GE(tr.min_eig[k], -1e-10);
    EXPECT_LE(std::abs(tr.p_ee[k]), 1e-12);
  }
}

TEST(SteadyState, VacuumWithoutDarkState) {
  const Generator gen(collective(1.0, 0.3, 0.8, 0.2));
  const DensityMatrix ss = steady_state(gen, projector(basis::eg));
  EXPECT_NEAR(ss(basis::gg, basis::gg).real(), 1.0, 1e-10);
}

TEST(SteadyState, DarkStateProjection) {
  // Delta y = b/4: g12 = g11 / sqrt(2), g22 = g11 / 2 in rate units.
  const double g = 1.5422190509776617;
  const Generator gen(collective(g, g / std::sqrt(2.0), g / 2.0, 0.0));
  const DensityMatrix ss = steady_state(gen, projector(basis::eg));
  EXPECT_NEAR(ss(basis::gg, basis::gg).real(), 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(ss(basis::ge, basis::ge).real(), 2.0 / 9.0, 1e-10);
  EXPECT_NEAR(ss(basis::eg, basis::eg).real(), 1.0 / 9.0, 1e-10);
  EXPECT_NEAR(ss(basis::ee, basis::ee).real(), 0.0, 1e-12);
}

TEST(SteadyState, DecoupledSecondAtomIsOrthogonalToStart) {
  const Generator gen(collective(1.5, 0.0, 0.0, 0.0));
  const DensityMatrix ss = steady_state(gen, projector(basis::eg));
  EXPECT_NEAR(ss(basis::gg, basis::gg).real(), 1.0, 1e-10);
}

TEST(SteadyState, RejectsPurelyCoherentGenerator) {
  LindbladSpec s;
  s.omega_a = 1.0;
  try {
    steady_state(Generator(s), projector(basis::eg));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::numerical);
  }
}

TEST(LindbladSpec, RejectsIndefiniteCollectiveDecay) {
  LindbladSpec s = collective(1.0, 2.0, 1.0, 0.0);
  try {
    Generator g(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("positive semidefinite"), std::string::npos);
  }
}

TEST(IntegrateMe, RejectsInvalidStates) {
  const Generator gen(collective(1.0, 0.5, 1.0, 0.0));
  DensityMatrix bad = projector(basis::eg) * 2.0;
  EXPECT_THROW(integrate_me(gen, bad, uniform_grid(1.0, 3)), Error);
  const std::vector<double> backwards = {0.0, 1.0, 0.5};
  EXPECT_THROW(integrate_me(gen, projector(basis::eg), backwards), Error);
}

TEST(StateFromAmplitudes, PutsMissingWeightInGround) {
  const DensityMatrix rho = state_from_amplitudes(cd(0.6, 0.0), cd(0.0, 0.0));
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-15);
  EXPECT_NEAR(rho(basis::gg, basis::gg).real(), 0.64, 1e-15);
  const Populations p = populations(rho);
  EXPECT_NEAR(p.p1, 0.36, 1e-15);
  EXPECT_EQ(p.p2, 0.0);
}
