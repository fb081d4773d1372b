#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "ddstab/errors.hpp"
#include "ddstab/experiments.hpp"
#include "helpers.hpp"

namespace ddstab {
namespace {

using testing::mat;

const NumericalConfig kCfg;

TEST(Simulate, ExampleOneReproducesStates) {
  const LtiSystem sys{mat(2, 2, {1, 0, 0, 0}), mat(2, 1, {1, 0})};
  const TrajectoryData ref = reference::example1_trajectory();
  const TrajectoryData sim = simulate(sys, ref.states[0], ref.inputs);
  ASSERT_EQ(sim.states.size(), 4u);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(sim.states[t], ref.states[t]);
}

TEST(Simulate, EmptyInputsAndShapeChecks) {
  const LtiSystem sys{mat(1, 1, {0.5}), mat(1, 1, {1})};
  const TrajectoryData sim = simulate(sys, mat(1, 1, {3}).col(0), {});
  EXPECT_EQ(sim.states.size(), 1u);
  EXPECT_THROW(simulate(sys, Vector::Zero(2), {}), DimensionMismatch);
  EXPECT_THROW(simulate(sys, Vector::Zero(1), {Vector::Zero(2)}), DimensionMismatch);
}

TEST(ThreeTank, ModelAndDiscretization) {
  const ContinuousSystem cs = three_tank_model(ThreeTankParams{});
  EXPECT_LE((cs.a_c - mat(3, 3, {-0.6, 0.5, 0, 0.5, -0.5, 0.5, 0, 0, -0.5})).norm(), 1e-15);
  EXPECT_EQ(cs.b_c, mat(3, 1, {0, 1, 0}));
  const LtiSystem d = zoh_discretize(cs);
  EXPECT_LE((d.a - reference::three_tank_a()).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_LE((d.b - reference::three_tank_b()).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_NEAR(d.a(2, 2), std::exp(-0.05), 1e-12);
  EXPECT_EQ(d.a(2, 0), 0.0);
  EXPECT_EQ(d.b(2, 0), 0.0);
}

TEST(ThreeTank, ParameterVariants) {
  ThreeTankParams doubled;
  doubled.a1 = doubled.a2 = doubled.a3 = 2.0;
  const ContinuousSystem base = three_tank_model(ThreeTankParams{});
  const ContinuousSystem cs = three_tank_model(doubled);
  EXPECT_LE((cs.a_c - 0.5 * base.a_c).norm(), 1e-15);
  EXPECT_LE((cs.b_c - 0.5 * base.b_c).norm(), 1e-15);

  ThreeTankParams closed{1, 1, 1, 0, 0, 0};
  EXPECT_EQ(three_tank_model(closed).a_c, Matrix::Zero(3, 3));
  const LtiSystem d = zoh_discretize(three_tank_model(closed));
  EXPECT_LE((d.a - Matrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LE((d.b - mat(3, 1, {0, 0.1, 0})).norm(), 1e-15);

  ThreeTankParams bad;
  bad.a2 = 0.0;
  EXPECT_THROW(three_tank_model(bad), std::invalid_argument);
  bad = {};
  bad.k12 = -0.1;
  EXPECT_THROW(three_tank_model(bad), std::invalid_argument);
  EXPECT_THROW(three_tank_model(ThreeTankParams{}, 0.0), std::invalid_argument);
}

TEST(ThreeTank, SimulationMatchesReferenceTable) {
  const TrajectoryData table = reference::three_tank_table();
  const LtiSystem d = zoh_discretize(three_tank_model(ThreeTankParams{}));
  const TrajectoryData sim = simulate(d, table.states[0], table.inputs);
  for (std::size_t t = 0; t < table.states.size(); ++t) {
    EXPECT_LE((sim.states[t] - table.states[t]).cwiseAbs().maxCoeff(), 1e-4) << "t = " << t;
  }
}

TEST(Zoh, HurwitzMapsToSchur) {
  std::mt19937_64 gen(97);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = std::uniform_int_distribution<Index>(1, 4)(gen);
    Matrix a = testing::gaussian(n, n, gen);
    const double shift = a.eigenvalues().real().maxCoeff() + 0.1;
    a -= shift * Matrix::Identity(n, n);
    const double h = 0.05 + 0.5 * std::uniform_real_distribution<double>()(gen);
    const LtiSystem d = zoh_discretize({a, testing::gaussian(n, 1, gen), h});
    const double expected = std::exp(h * a.eigenvalues().real().maxCoeff());
    EXPECT_NEAR(spectral_radius(d.a), expected, 1e-8);
    EXPECT_LT(spectral_radius(d.a), 1.0);
  }
}

MonteCarloConfig small_config() {
  MonteCarloConfig cfg;
  cfg.scenarios = 60;
  cfg.horizon = 10;
  cfg.t_list = {3, 4, 5, 10};
  cfg.seed = 7;
  return cfg;
}

TEST(MonteCarlo, ConfigValidation) {
  MonteCarloConfig cfg = small_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.t_list = {11};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.scenarios = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.poisson_lambda = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.threads = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(MonteCarlo, DeterministicAndThreadIndependent) {
  MonteCarloConfig cfg = small_config();
  const MonteCarloResult a = run_monte_carlo(cfg, kCfg);
  const MonteCarloResult b = run_monte_carlo(cfg, kCfg);
  cfg.threads = 2;
  const MonteCarloResult c = run_monte_carlo(cfg, kCfg);
  ASSERT_EQ(a.verdicts.size(), 60u * 4u);
  ASSERT_EQ(a.verdicts.size(), c.verdicts.size());
  for (std::size_t i = 0; i < a.verdicts.size(); ++i) {
    for (const MonteCarloResult* other : {&b, &c}) {
      const ScenarioVerdict& x = a.verdicts[i];
      const ScenarioVerdict& y = other->verdicts[i];
      EXPECT_EQ(x.scenario, y.scenario);
      EXPECT_EQ(x.horizon, y.horizon);
      EXPECT_EQ(x.ident, y.ident);
      EXPECT_EQ(x.plain, y.plain);
      EXPECT_EQ(x.sigma_stab, y.sigma_stab);
      EXPECT_EQ(x.solver_failure, y.solver_failure);
    }
  }
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    EXPECT_EQ(a.rows[r].sigma_stab_pct, c.rows[r].sigma_stab_pct);
  }
}

TEST(MonteCarlo, VerdictInvariants) {
  const MonteCarloResult res = run_monte_carlo(small_config(), kCfg);
  EXPECT_EQ(res.seed, 7u);
  EXPECT_EQ(res.scenarios, 60u);
  ASSERT_EQ(res.rows.size(), 4u);
  EXPECT_EQ(res.rows[0].horizon, 3);
  // Three samples cannot identify four unknown columns.
  EXPECT_EQ(res.rows[0].ident_pct, 0.0);
  for (std::size_t r = 0; r + 1 < res.rows.size(); ++r) {
    EXPECT_LE(res.rows[r].ident_pct, res.rows[r + 1].ident_pct);
  }
  for (const MonteCarloRow& row : res.rows) {
    EXPECT_LE(row.plain_pct, row.sigma_stab_pct);
    EXPECT_EQ(row.solver_failures, 0u);
  }
  std::size_t prev_scenario = 0;
  for (const ScenarioVerdict& v : res.verdicts) {
    EXPECT_GE(v.scenario, prev_scenario);
    prev_scenario = v.scenario;
    if (v.plain) {
      EXPECT_TRUE(v.sigma_stab);
    }
    if (v.ident) {
      EXPECT_TRUE(v.plain);
    }
  }
}

TEST(Demo, ExampleOne) {
  const Example1Bundle b = demo_example1(kCfg, {});
  EXPECT_TRUE(b.report.sigma_stab);
  EXPECT_FALSE(b.report.plain_stab);
  EXPECT_NEAR(b.synthesis.gain.k(0, 1), 0.0, 1e-14);
  EXPECT_TRUE(b.verification.pass);
  EXPECT_TRUE(b.reference_gain_verification.pass);
  EXPECT_LT(b.verification.max_spectral_radius, 1.0);
}

TEST(Demo, ExampleTwoPlane) {
  const Example2Bundle b = demo_example2(kCfg);
  EXPECT_FALSE(b.report.sigma_stab);
  EXPECT_EQ(b.grid.size(), 17u * 17u);
  std::size_t uncontrollable = 0;
  for (const PlanePoint& p : b.grid) {
    // -a + b1 - b2 = -1 on the consistent plane.
    EXPECT_NEAR(-p.a + p.b1 - p.b2, -1.0, 1e-12);
    if (!p.controllable) {
      ++uncontrollable;
      EXPECT_EQ(p.b1, 0.0);
      EXPECT_EQ(p.b2, 0.0);
      EXPECT_EQ(p.a, 1.0);
    }
  }
  EXPECT_EQ(uncontrollable, 1u);
}

TEST(Demo, ThreeTank) {
  const ThreeTankBundle b = demo_three_tank(kCfg, {});
  EXPECT_TRUE(b.report.sigma_stab);
  EXPECT_FALSE(b.report.plain_stab);
  EXPECT_EQ(b.report.rank_x_minus, 2);
  EXPECT_LT(b.closed_loop_rho, 1.0);
  EXPECT_NEAR(b.reference_gain_rho, 0.9512, 1e-4);
  EXPECT_TRUE(b.verification.pass);
  EXPECT_EQ(b.closed_loop_spectrum.size(), 3);
  // The third tank is decoupled from the input, so its mode exp(-0.05) survives feedback.
  double closest = 1.0;
  for (Index i = 0; i < 3; ++i) {
    closest = std::min(closest, std::abs(b.closed_loop_spectrum(i) - std::exp(-0.05)));
  }
  EXPECT_LE(closest, 1e-9);
}

}  // namespace
}  // namespace ddstab
