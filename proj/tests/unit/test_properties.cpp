// Cross-module properties on randomly generated datasets.
#include <gtest/gtest.h>

#include "ddstab/experiments.hpp"
#include "ddstab/informativity.hpp"
#include "ddstab/verification.hpp"
#include "helpers.hpp"

namespace ddstab {
namespace {

const NumericalConfig kCfg;

struct Dataset {
  LtiSystem truth;
  DataMatrices data;
};

// Mixes controllable and uncontrollable systems, short and long horizons, and initial
// states at the origin so that rank-deficient X- with im X+ in im X- occurs regularly.
Dataset random_dataset(std::mt19937_64& gen) {
  const Index n = std::uniform_int_distribution<Index>(1, 5)(gen);
  const Index m = std::uniform_int_distribution<Index>(1, 2)(gen);
  const Index t = std::uniform_int_distribution<Index>(1, n + m + 3)(gen);
  const double radius = std::uniform_real_distribution<double>(0.5, 1.5)(gen);
  LtiSystem sys = testing::random_system(n, m, gen, radius, 0.5);
  std::vector<Vector> inputs;
  for (Index k = 0; k < t; ++k) inputs.push_back(testing::gaussian(m, 1, gen).col(0));
  Vector x0 = testing::gaussian(n, 1, gen).col(0);
  if (std::bernoulli_distribution(0.4)(gen)) x0.setZero();
  return {sys, build_data_matrices(simulate(sys, x0, inputs))};
}

VerificationOptions quick_options(std::uint64_t seed) {
  VerificationOptions opts;
  opts.samples_per_scale = 40;
  opts.seed = seed;
  return opts;
}

TEST(Properties, VerdictEquivalencesAndMonotonicity) {
  std::mt19937_64 gen(107);
  int full_rank = 0, deficient = 0, informative = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset ds = random_dataset(gen);
    const InformativityReport rep = check_sigma_stab(ds.data, kCfg);
    ASSERT_FALSE(rep.solver_failure()) << rep.diagnostics.plain_message;
    EXPECT_EQ(rep.sigma_cont_stab, rep.plain_stab);
    EXPECT_EQ(check_sigma_cont(ds.data, kCfg).informative, rep.plain_stab);
    if (rep.plain_stab) {
      EXPECT_TRUE(rep.sigma_stab);
    }
    if (rep.rank_x_minus == ds.data.n()) {
      ++full_rank;
      EXPECT_EQ(rep.sigma_stab, rep.plain_stab);
    } else {
      ++deficient;
      EXPECT_EQ(rep.sigma_stab, rep.condition_a && rep.condition_b);
    }
    informative += rep.sigma_stab;
    // The true system is always consistent with its own data.
    EXPECT_TRUE(consistent_set(ds.data, kCfg).contains(ds.truth, kCfg));
  }
  EXPECT_GT(full_rank, 40);
  EXPECT_GT(deficient, 40);
  EXPECT_GT(informative, 20);
}

TEST(Properties, RankDeficientPositiveVerdictsAreConstructive) {
  std::mt19937_64 gen(109);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 30; ++trial) {
    const Dataset ds = random_dataset(gen);
    const InformativityReport rep = check_sigma_stab(ds.data, kCfg);
    if (rep.branch != Branch::RankDeficient || !rep.sigma_stab) continue;
    ++checked;
    const StabSynthesis s = synthesize_stab(ds.data, kCfg);
    const ConsistentSet set = consistent_set(ds.data, kCfg);
    const VerificationReport v = verify_gain(set, s.gain, quick_options(trial), kCfg);
    EXPECT_TRUE(v.pass) << "trial " << trial << " rho " << v.max_spectral_radius;
    EXPECT_LE(v.max_structural_residual(), 1e-6);
    if (is_stabilizable(ds.truth.a, ds.truth.b, kCfg)) {
      EXPECT_TRUE(is_schur(ds.truth.a + ds.truth.b * s.gain.k, kCfg));
    }

    const Index r = s.compression.rank;
    if (r == 0) continue;
    const ReachablePart part = reachable_part(ds.data, s.compression, kCfg);
    const Matrix& theta = s.solution.theta;
    const Matrix p = s.compression.x_hat_minus * theta;
    const Matrix p_sym = 0.5 * (p + p.transpose());
    const Matrix cl_data = s.compression.x_hat_plus * theta * p_sym.inverse();
    const Matrix cl = part.a11 + part.b1 * s.k1;
    EXPECT_LE((cl - cl_data).norm(), 1e-6);
    EXPECT_LT(spectral_radius(cl_data), 1.0);
    EXPECT_GT(min_symmetric_eigenvalue(p_sym - cl * p_sym * cl.transpose()), 0.0);
  }
  EXPECT_GE(checked, 10);
}

TEST(Properties, RankDeficientNegativeVerdictsAreFalsified) {
  std::mt19937_64 gen(113);
  int checked = 0;
  for (int trial = 0; trial < 600 && checked < 15; ++trial) {
    const Dataset ds = random_dataset(gen);
    const InformativityReport rep = check_sigma_stab(ds.data, kCfg);
    if (rep.branch != Branch::RankDeficient || rep.sigma_stab) continue;
    ++checked;
    const ConsistentSet set = consistent_set(ds.data, kCfg);
    for (int c = 0; c < 10; ++c) {
      const FeedbackGain k{testing::gaussian(ds.data.m(), ds.data.n(), gen), GainProvenance::StabPrior,
                           K2Policy::zero()};
      const VerificationReport v = verify_gain(set, k, quick_options(1000 * trial + c), kCfg);
      EXPECT_FALSE(v.pass) << "trial " << trial << " candidate " << c;
      if (!v.pass) {
        ASSERT_TRUE(v.worst_member.has_value());
        const LtiSystem& w = *v.worst_member;
        EXPECT_GE(spectral_radius(w.a + w.b * k.k), 1.0 - kCfg.schur_margin);
        EXPECT_TRUE(is_stabilizable(w.a, w.b, kCfg));
      }
    }
  }
  EXPECT_GE(checked, 10);
}

TEST(Properties, PlainGainsStabilizeAllConsistentSystems) {
  std::mt19937_64 gen(127);
  int checked = 0;
  for (int trial = 0; trial < 300 && checked < 25; ++trial) {
    const Dataset ds = random_dataset(gen);
    const LmiSolution sol = solve_plain_lmi(ds.data, kCfg);
    if (!sol.feasible()) continue;
    ++checked;
    const FeedbackGain g = gain_from_plain(ds.data, sol);
    const VerificationReport v = verify_gain(consistent_set(ds.data, kCfg), g, quick_options(trial), kCfg);
    EXPECT_FALSE(v.filtered);
    EXPECT_TRUE(v.pass) << "trial " << trial;
  }
  EXPECT_GE(checked, 10);
}

TEST(Properties, FailedVerificationExposesRecomputableWitness) {
  std::mt19937_64 gen(131);
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset ds = random_dataset(gen);
    const FeedbackGain k{testing::gaussian(ds.data.m(), ds.data.n(), gen, 3.0), GainProvenance::Plain,
                         std::nullopt};
    const VerificationReport v = verify_gain(consistent_set(ds.data, kCfg), k, quick_options(trial), kCfg);
    EXPECT_EQ(v.pass, v.max_spectral_radius <= 1.0 - kCfg.schur_margin);
    ASSERT_TRUE(v.worst_member.has_value());
    EXPECT_NEAR(spectral_radius(v.worst_member->a + v.worst_member->b * k.k), v.max_spectral_radius, 1e-12);
  }
}

TEST(Properties, IdentificationIsMonotoneInHorizon) {
  std::mt19937_64 gen(137);
  for (int trial = 0; trial < 100; ++trial) {
    const Dataset ds = random_dataset(gen);
    bool seen = false;
    for (Index t = 1; t <= ds.data.horizon(); ++t) {
      const bool ident = check_identification(ds.data.first_samples(t), kCfg);
      if (seen) {
        EXPECT_TRUE(ident);
      }
      seen = seen || ident;
    }
  }
}

}  // namespace
}  // namespace ddstab
