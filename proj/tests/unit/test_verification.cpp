#include <gtest/gtest.h>

#include <array>

#include "ddstab/errors.hpp"
#include "ddstab/experiments.hpp"
#include "ddstab/verification.hpp"
#include "helpers.hpp"

namespace ddstab {
namespace {

using testing::mat;

const NumericalConfig kCfg;

DataMatrices example1() { return build_data_matrices(reference::example1_trajectory()); }

FeedbackGain stab_gain(Matrix k) { return {std::move(k), GainProvenance::StabPrior, K2Policy::zero()}; }

TEST(VerifyGain, ExampleOneReferenceGainPasses) {
  const ConsistentSet set = consistent_set(example1(), kCfg);
  const VerificationReport rep = verify_gain(set, stab_gain(reference::example1_gain()), {}, kCfg);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.filtered);
  EXPECT_EQ(rep.samples_tested, 601u);
  EXPECT_GT(rep.rejected_unstabilizable, 0u);
  EXPECT_LT(rep.max_spectral_radius, 1.0);
  EXPECT_LE(rep.max_structural_residual(), 1e-12);
}

TEST(VerifyGain, ZeroGainFailsWithWitness) {
  const ConsistentSet set = consistent_set(example1(), kCfg);
  const VerificationReport rep = verify_gain(set, stab_gain(Matrix::Zero(1, 2)), {}, kCfg);
  EXPECT_FALSE(rep.pass);
  EXPECT_GE(rep.max_spectral_radius, 1.0);
  ASSERT_TRUE(rep.worst_member.has_value());
  EXPECT_TRUE(set.contains(*rep.worst_member, kCfg));
  EXPECT_TRUE(is_stabilizable(rep.worst_member->a, rep.worst_member->b, kCfg));
  EXPECT_GE(spectral_radius(rep.worst_member->a), 1.0);
}

TEST(VerifyGain, UnfilteredPlainGainSeesUnstabilizableMembers) {
  const ConsistentSet set = consistent_set(example1(), kCfg);
  FeedbackGain g = stab_gain(reference::example1_gain());
  g.provenance = GainProvenance::Plain;
  const VerificationReport rep = verify_gain(set, g, {}, kCfg);
  EXPECT_FALSE(rep.filtered);
  EXPECT_EQ(rep.rejected_unstabilizable, 0u);
  EXPECT_FALSE(rep.pass);
}

TEST(VerifyGain, SingletonSetChecksOneSystem) {
  std::mt19937_64 gen(79);
  const LtiSystem sys = testing::random_system(2, 1, gen, 1.1);
  const DataMatrices d = build_data_matrices(testing::random_trajectory(sys, 6, gen));
  const ConsistentSet set = consistent_set(d, kCfg);
  ASSERT_EQ(set.basis.dim(), 0);
  const LmiSolution sol = solve_plain_lmi(d, kCfg);
  ASSERT_TRUE(sol.feasible());
  const FeedbackGain g = gain_from_plain(d, sol);
  const VerificationReport rep = verify_gain(set, g, {}, kCfg);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.max_spectral_radius, spectral_radius(sys.a + sys.b * g.k), 1e-8);
}

TEST(VerifyGain, DeterministicAndShapeChecked) {
  const ConsistentSet set = consistent_set(example1(), kCfg);
  VerificationOptions opts;
  opts.seed = 17;
  opts.samples_per_scale = 50;
  const VerificationReport a = verify_gain(set, stab_gain(reference::example1_gain()), opts, kCfg);
  const VerificationReport b = verify_gain(set, stab_gain(reference::example1_gain()), opts, kCfg);
  EXPECT_EQ(a.max_spectral_radius, b.max_spectral_radius);
  EXPECT_EQ(a.rejected_unstabilizable, b.rejected_unstabilizable);
  EXPECT_EQ(a.samples_tested, 151u);
  EXPECT_THROW(verify_gain(set, stab_gain(Matrix::Zero(1, 3)), opts, kCfg), DimensionMismatch);
}

TEST(StructuralNullity, ZeroForExampleOne) {
  const ConsistentSet set = consistent_set(example1(), kCfg);
  EXPECT_LE(structural_nullity(set, reference::example1_gain(), set.particular, kCfg), 1e-14);
  EXPECT_LE(structural_nullity(set, Matrix::Zero(1, 2), set.particular, kCfg), 1e-14);
}

TEST(StructuralNullity, PositiveForExampleTwo) {
  const ConsistentSet set = consistent_set(build_data_matrices(reference::example2_trajectory()), kCfg);
  const LtiSystem base{mat(1, 1, {2}), mat(1, 2, {1, 0})};
  EXPECT_GT(structural_nullity(set, mat(2, 1, {-1, 0}), base, kCfg), 0.1);
}

TEST(DecompositionCheck, ExampleOneMember) {
  const DataMatrices d = example1();
  const RowCompression rc = row_compress(d.x_minus, d.x_plus, kCfg);
  const LtiSystem sys{mat(2, 2, {1, 2, 0, 0.4}), mat(2, 1, {1, 0})};
  const DecompositionDiagnostics diag = decomposition_check(d, rc, sys, kCfg);
  EXPECT_TRUE(diag.pass);
  EXPECT_LE(diag.a21_norm, 1e-12);
  EXPECT_LE(diag.b2_norm, 1e-12);
  EXPECT_TRUE(diag.a22_schur);
  EXPECT_TRUE(diag.pair11_stabilizable);
  ASSERT_TRUE(diag.reachable_mismatch.has_value());
  EXPECT_LE(*diag.reachable_mismatch, 1e-10);
  EXPECT_NEAR(diag.a12(0, 0), 2.0, 1e-12);

  const LtiSystem unstable{mat(2, 2, {1, 2, 0, 1.5}), mat(2, 1, {1, 0})};
  EXPECT_FALSE(decomposition_check(d, rc, unstable, kCfg).a22_schur);
}

TEST(DecompositionCheck, ThreeTank) {
  const DataMatrices d = build_data_matrices(reference::three_tank_table());
  const RowCompression rc = row_compress(d.x_minus, d.x_plus, kCfg);
  const LtiSystem sys{reference::three_tank_a(), reference::three_tank_b()};
  const DecompositionDiagnostics diag = decomposition_check(d, rc, sys, kCfg, 1e-3);
  EXPECT_TRUE(diag.pass);
  EXPECT_LE(diag.a21_norm, 1e-12);
  EXPECT_TRUE(diag.a22_schur);
}

TEST(DecompositionCheck, FullRankData) {
  std::mt19937_64 gen(83);
  const LtiSystem sys = testing::random_system(2, 1, gen, 0.9);
  const DataMatrices d = build_data_matrices(testing::random_trajectory(sys, 5, gen));
  const RowCompression rc = row_compress(d.x_minus, d.x_plus, kCfg);
  const DecompositionDiagnostics diag = decomposition_check(d, rc, sys, kCfg);
  EXPECT_EQ(diag.a22.size(), 0);
  EXPECT_TRUE(diag.pass);
}

TEST(DecompositionCheck, ThrowsWhenConditionsFail) {
  TrajectoryData traj = reference::example1_trajectory();
  traj.states[3] = mat(2, 1, {3, 1}).col(0);
  const DataMatrices d = build_data_matrices(traj);
  const RowCompression rc = row_compress(d.x_minus, d.x_plus, kCfg);
  const LtiSystem sys{Matrix::Identity(2, 2), mat(2, 1, {1, 0})};
  EXPECT_THROW(decomposition_check(d, rc, sys, kCfg), PreconditionViolated);
}

std::vector<Matrix> example1_family(double alpha_max) {
  std::vector<Matrix> family;
  for (double alpha : {-alpha_max, 0.0, alpha_max}) {
    for (double beta : {-0.5, 0.0, 0.5}) family.push_back(mat(2, 2, {0, alpha, 0, beta}));
  }
  return family;
}

TEST(CommonLyapunov, ExampleOneFamily) {
  const auto family = example1_family(10.0);
  const LyapunovResult res = common_lyapunov(family, kCfg);
  ASSERT_EQ(res.status, LmiStatus::Feasible) << res.message;
  ASSERT_TRUE(res.certificate.has_value());
  const Matrix& p = res.certificate->p;
  EXPECT_GT(min_symmetric_eigenvalue(p), 0.0);
  ASSERT_EQ(res.certificate->decrease_margins.size(), family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double margin = min_symmetric_eigenvalue(p - family[i] * p * family[i].transpose());
    EXPECT_NEAR(margin, res.certificate->decrease_margins[i], 1e-12);
    EXPECT_GT(margin, 0.0);
  }
  EXPECT_GT(p(0, 0) / p(1, 1), 100.0);
}

TEST(CommonLyapunov, NonSchurMemberIsInfeasible) {
  const std::array<Matrix, 2> family{mat(1, 1, {0.5}), mat(1, 1, {1.2})};
  const LyapunovResult res = common_lyapunov(family, kCfg);
  EXPECT_EQ(res.status, LmiStatus::Infeasible) << res.message;
  EXPECT_FALSE(res.certificate.has_value());
}

TEST(CommonLyapunov, InputChecks) {
  EXPECT_THROW(common_lyapunov(std::vector<Matrix>{}, kCfg), std::invalid_argument);
  const std::array<Matrix, 2> mixed{Matrix::Zero(1, 1), Matrix::Zero(2, 2)};
  EXPECT_THROW(common_lyapunov(mixed, kCfg), DimensionMismatch);
}

TEST(Genericity, ExampleTwoLine) {
  const Matrix m = mat(1, 1, {2});
  const Matrix n = mat(1, 2, {1, 0});
  const Matrix m0 = mat(1, 1, {-1});
  const Matrix n0 = mat(1, 2, {-1, 0});
  const std::array<double, 5> alphas{-1.0, 0.0, 0.5, 1.0, 2.0};
  EXPECT_EQ(genericity_probe(m, n, m0, n0, alphas, kCfg), 1u);
  const std::array<double, 1> one{1.0};
  EXPECT_EQ(genericity_probe(m, n, m0, n0, one, kCfg), 1u);
  EXPECT_THROW(genericity_probe(m, mat(1, 2, {0, 0}), m0, n0, alphas, kCfg), PreconditionViolated);
  EXPECT_THROW(genericity_probe(m, n, m0, mat(1, 1, {0}), alphas, kCfg), DimensionMismatch);
}

TEST(Genericity, RandomLinesHaveFewUncontrollablePoints) {
  std::mt19937_64 gen(89);
  std::vector<double> alphas;
  for (int i = -50; i <= 50; ++i) alphas.push_back(0.1 * i);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = std::uniform_int_distribution<Index>(1, 4)(gen);
    const LtiSystem base = testing::random_system(n, 1, gen, 1.0);
    if (!is_controllable(base.a, base.b, kCfg)) continue;
    const Matrix m0 = testing::gaussian(n, n, gen);
    const Matrix n0 = testing::gaussian(n, 1, gen);
    EXPECT_LE(genericity_probe(base.a, base.b, m0, n0, alphas, kCfg),
              static_cast<std::size_t>(n * n));
  }
}

}  // namespace
}  // namespace ddstab
