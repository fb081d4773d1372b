#pragma once

#include <cstdint>
#include <vector>

#include "ddstab/datamodel.hpp"
#include "ddstab/informativity.hpp"
#include "ddstab/lmisynth.hpp"
#include "ddstab/matrixcore.hpp"
#include "ddstab/sdp.hpp"
#include "ddstab/verification.hpp"

namespace ddstab {

/// dx/dt = A_c x + B_c u, sampled every `sample_time` time units.
struct ContinuousSystem {
  Matrix a_c;
  Matrix b_c;
  double sample_time = 0.1;
};

/// Tank areas (positive) and flow coefficients (non-negative) of the three-tank process.
struct ThreeTankParams {
  double a1 = 1.0;
  double a2 = 1.0;
  double a3 = 1.0;
  double k01 = 0.1;
  double k12 = 0.5;
  double k23 = 0.5;

  void validate() const;
};

ContinuousSystem three_tank_model(const ThreeTankParams& params, double sample_time = 0.1);

/// Exact sampling under piecewise-constant input via exp(h [[A_c, B_c], [0, 0]]).
LtiSystem zoh_discretize(const ContinuousSystem& cs);

TrajectoryData simulate(const LtiSystem& system, const Vector& x0,
                        const std::vector<Vector>& inputs);

/// Reference datasets and matrices used by the demos and acceptance checks.
namespace reference {
TrajectoryData example1_trajectory();
TrajectoryData example2_trajectory();
/// Three-tank experiment, T = 5, states rounded to four decimals.
TrajectoryData three_tank_table();
Matrix three_tank_a();
Matrix three_tank_b();
/// Printed T x r LMI witness (rounded).
Matrix three_tank_theta();
Matrix three_tank_gain();
Matrix example1_gain();
}  // namespace reference

struct MonteCarloConfig {
  std::size_t scenarios = 1000;
  Index horizon = 100;
  std::vector<Index> t_list{3, 4, 5, 10, 100};
  double poisson_lambda = 1.0;
  std::uint64_t seed = 20240501;
  LtiSystem system = zoh_discretize(three_tank_model(ThreeTankParams{}));
  unsigned threads = 1;

  void validate() const;
};

struct ScenarioVerdict {
  std::size_t scenario = 0;
  Index horizon = 0;
  bool ident = false;
  bool plain = false;
  bool sigma_stab = false;
  bool solver_failure = false;
  Branch branch = Branch::FullRank;
};

struct MonteCarloRow {
  Index horizon = 0;
  double ident_pct = 0.0;
  double plain_pct = 0.0;
  double sigma_stab_pct = 0.0;
  std::size_t solver_failures = 0;
};

struct MonteCarloResult {
  std::uint64_t seed = 0;
  std::size_t scenarios = 0;
  std::vector<MonteCarloRow> rows;
  /// Ordered by (scenario, position of T in t_list).
  std::vector<ScenarioVerdict> verdicts;
};

/// Trajectory of one scenario: x(0) (n entries) is drawn first, then the inputs, all from
/// Poisson(lambda) on stream (seed, scenario).
TrajectoryData scenario_trajectory(const MonteCarloConfig& config, std::size_t scenario);

/// Draws x(0) (n entries, first) then the scalar-per-channel input sequence from
/// Poisson(lambda), simulates `horizon` steps and evaluates the informativity notions on the
/// first T samples for every T. Scenario s uses stream (seed, s).
MonteCarloResult run_monte_carlo(const MonteCarloConfig& config, const NumericalConfig& cfg,
                                 const SdpBackend& backend = builtin_backend());

struct Example1Bundle {
  TrajectoryData trajectory;
  DataMatrices data;
  InformativityReport report;
  StabSynthesis synthesis;
  VerificationReport verification;
  VerificationReport reference_gain_verification;
};

struct PlanePoint {
  double a = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  bool controllable = true;
};

struct Example2Bundle {
  TrajectoryData trajectory;
  InformativityReport report;
  std::vector<PlanePoint> grid;
};

struct ThreeTankBundle {
  ContinuousSystem continuous;
  LtiSystem discrete;
  TrajectoryData table;
  TrajectoryData simulated;
  DataMatrices data;
  InformativityReport report;
  StabSynthesis synthesis;
  Eigen::VectorXcd closed_loop_spectrum;
  double closed_loop_rho = 0.0;
  double reference_gain_rho = 0.0;
  VerificationReport verification;
};

Example1Bundle demo_example1(const NumericalConfig& cfg, const VerificationOptions& options,
                             const SdpBackend& backend = builtin_backend());

/// Grid over (b1, b2) in [-half_width, half_width] with `step` spacing on the plane of
/// systems consistent with the one-sample dataset.
Example2Bundle demo_example2(const NumericalConfig& cfg, double half_width = 2.0,
                             double step = 0.25,
                             const SdpBackend& backend = builtin_backend());

ThreeTankBundle demo_three_tank(const NumericalConfig& cfg, const VerificationOptions& options,
                                const SdpBackend& backend = builtin_backend());

}  // namespace ddstab
