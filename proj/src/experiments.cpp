#include "ddstab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "ddstab/errors.hpp"
#include "ddstab/rng.hpp"

namespace ddstab {

void ThreeTankParams::validate() const {
  for (double area : {a1, a2, a3}) {
    if (!(area > 0.0) || !std::isfinite(area)) {
      throw std::invalid_argument("three-tank areas must be positive");
    }
  }
  for (double k : {k01, k12, k23}) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
      throw std::invalid_argument("three-tank flow coefficients must be non-negative");
    }
  }
}

ContinuousSystem three_tank_model(const ThreeTankParams& p, double sample_time) {
  p.validate();
  if (!(sample_time > 0.0)) throw std::invalid_argument("sample time must be positive");
  ContinuousSystem cs;
  cs.a_c.resize(3, 3);
  cs.a_c << -(p.k01 + p.k12) / p.a1, p.k12 / p.a1, 0.0,
             p.k12 / p.a2, -p.k12 / p.a2, p.k23 / p.a2,
             0.0, 0.0, -p.k23 / p.a3;
  cs.b_c.resize(3, 1);
  cs.b_c << 0.0, 1.0 / p.a2, 0.0;
  cs.sample_time = sample_time;
  return cs;
}

LtiSystem zoh_discretize(const ContinuousSystem& cs) {
  const Index n = cs.a_c.rows();
  const Index m = cs.b_c.cols();
  if (cs.a_c.cols() != n || cs.b_c.rows() != n) {
    throw DimensionMismatch("zoh_discretize: A_c must be n x n and B_c n x m");
  }
  if (!(cs.sample_time > 0.0)) throw std::invalid_argument("sample time must be positive");
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = cs.a_c;
  aug.topRightCorner(n, m) = cs.b_c;
  const Matrix phi = matrix_exponential(cs.sample_time * aug);
  return {phi.topLeftCorner(n, n), phi.topRightCorner(n, m)};
}

TrajectoryData simulate(const LtiSystem& system, const Vector& x0,
                        const std::vector<Vector>& inputs) {
  const Index n = system.a.rows();
  if (system.a.cols() != n || system.b.rows() != n || x0.size() != n) {
    throw DimensionMismatch("simulate: inconsistent system or initial state dimensions");
  }
  TrajectoryData traj;
  traj.inputs = inputs;
  traj.states.reserve(inputs.size() + 1);
  traj.states.push_back(x0);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (inputs[t].size() != system.b.cols()) {
      throw DimensionMismatch("simulate: input u(" + std::to_string(t) + ") has wrong size");
    }
    traj.states.push_back(system.a * traj.states.back() + system.b * inputs[t]);
  }
  return traj;
}

namespace reference {

namespace {
Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}
}  // namespace

TrajectoryData example1_trajectory() {
  return {{vec({1.0}), vec({2.0}), vec({-1.0})},
          {vec({1.0, 0.0}), vec({2.0, 0.0}), vec({4.0, 0.0}), vec({3.0, 0.0})}};
}

TrajectoryData example2_trajectory() {
  return {{vec({1.0, -1.0})}, {vec({-1.0}), vec({-1.0})}};
}

TrajectoryData three_tank_table() {
  return {{vec({1}), vec({0}), vec({-1}), vec({0}), vec({1})},
          {vec({1, 2, 0}), vec({1.04, 2.0498, 0}), vec({1.0778, 2.0015, 0}),
           vec({1.1086, 1.8597, 0}), vec({1.1334, 1.8237, 0}), vec({1.1575, 1.8881, 0})}};
}

Matrix three_tank_a() {
  Matrix a(3, 3);
  a << 0.9429, 0.0473, 0.0012,
       0.0473, 0.9524, 0.0476,
       0.0, 0.0, 0.9512;
  return a;
}

Matrix three_tank_b() {
  Matrix b(3, 1);
  b << 0.0024, 0.0976, 0.0;
  return b;
}

Matrix three_tank_theta() {
  Matrix theta(2, 5);
  theta << -47.4426, -30.3733, -1.5964, 49.2034, 36.0139,
           -0.9001, 17.7153, 32.3315, 20.4120, -68.9591;
  return theta.transpose();
}

Matrix three_tank_gain() {
  Matrix k(1, 3);
  k << -2.7728, -9.7123, 0.0;
  return k;
}

Matrix example1_gain() {
  Matrix k(1, 2);
  k << -1.0, 0.0;
  return k;
}

}  // namespace reference

void MonteCarloConfig::validate() const {
  if (scenarios == 0) throw std::invalid_argument("Monte Carlo needs at least one scenario");
  if (horizon < 1) throw std::invalid_argument("Monte Carlo horizon must be positive");
  if (t_list.empty()) throw std::invalid_argument("Monte Carlo T list is empty");
  for (Index t : t_list) {
    if (t < 1 || t > horizon) {
      throw std::invalid_argument("every T must lie in [1, horizon]; got " + std::to_string(t));
    }
  }
  if (!(poisson_lambda > 0.0)) throw std::invalid_argument("Poisson parameter must be positive");
  if (threads == 0) throw std::invalid_argument("Monte Carlo needs at least one worker thread");
  if (system.a.rows() == 0 || system.a.rows() != system.a.cols() ||
      system.b.rows() != system.a.rows()) {
    throw DimensionMismatch("Monte Carlo system has inconsistent dimensions");
  }
}

TrajectoryData scenario_trajectory(const MonteCarloConfig& config, std::size_t scenario) {
  const Index n = config.system.a.rows();
  const Index m = config.system.b.cols();
  auto gen = stream_engine(config.seed, scenario);
  std::poisson_distribution<int> poisson(config.poisson_lambda);

  Vector x0(n);
  for (Index i = 0; i < n; ++i) x0(i) = poisson(gen);
  std::vector<Vector> inputs(static_cast<std::size_t>(config.horizon), Vector(m));
  for (Vector& u : inputs) {
    for (Index j = 0; j < m; ++j) u(j) = poisson(gen);
  }
  return simulate(config.system, x0, inputs);
}

namespace {

std::vector<ScenarioVerdict> run_scenario(const MonteCarloConfig& config, std::size_t scenario,
                                          const NumericalConfig& cfg, const SdpBackend& backend) {
  const DataMatrices full = build_data_matrices(scenario_trajectory(config, scenario));

  std::vector<ScenarioVerdict> out;
  out.reserve(config.t_list.size());
  for (Index horizon : config.t_list) {
    const InformativityReport rep = check_sigma_stab(full.first_samples(horizon), cfg, backend);
    ScenarioVerdict v;
    v.scenario = scenario;
    v.horizon = horizon;
    v.ident = rep.ident;
    v.plain = rep.plain_stab;
    v.sigma_stab = rep.sigma_stab;
    v.solver_failure = rep.solver_failure();
    v.branch = rep.branch;
    out.push_back(v);
  }
  return out;
}

}  // namespace

MonteCarloResult run_monte_carlo(const MonteCarloConfig& config, const NumericalConfig& cfg,
                                 const SdpBackend& backend) {
  config.validate();
  cfg.validate();
  std::vector<std::vector<ScenarioVerdict>> per_scenario(config.scenarios);

  const unsigned workers = config.threads;
  if (workers == 1) {
    for (std::size_t s = 0; s < config.scenarios; ++s) {
      per_scenario[s] = run_scenario(config, s, cfg, backend);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t s = next++; s < config.scenarios; s = next++) {
          per_scenario[s] = run_scenario(config, s, cfg, backend);
        }
      });
    }
  }

  MonteCarloResult result;
  result.seed = config.seed;
  result.scenarios = config.scenarios;
  const std::size_t nt = config.t_list.size();
  std::vector<std::size_t> ident(nt), plain(nt), stab(nt), failures(nt);
  for (auto& verdicts : per_scenario) {
    for (std::size_t i = 0; i < nt; ++i) {
      ident[i] += verdicts[i].ident;
      plain[i] += verdicts[i].plain;
      stab[i] += verdicts[i].sigma_stab;
      failures[i] += verdicts[i].solver_failure;
    }
    result.verdicts.insert(result.verdicts.end(), verdicts.begin(), verdicts.end());
  }
  const double total = static_cast<double>(config.scenarios);
  for (std::size_t i = 0; i < nt; ++i) {
    result.rows.push_back({config.t_list[i], 100.0 * static_cast<double>(ident[i]) / total,
                           100.0 * static_cast<double>(plain[i]) / total,
                           100.0 * static_cast<double>(stab[i]) / total, failures[i]});
  }
  return result;
}

Example1Bundle demo_example1(const NumericalConfig& cfg, const VerificationOptions& options,
                             const SdpBackend& backend) {
  Example1Bundle b;
  b.trajectory = reference::example1_trajectory();
  b.data = build_data_matrices(b.trajectory);
  b.report = check_sigma_stab(b.data, cfg, backend);
  b.synthesis = synthesize_stab(b.data, cfg, K2Policy::zero(), backend);
  const ConsistentSet set = consistent_set(b.data, cfg);
  b.verification = verify_gain(set, b.synthesis.gain, options, cfg);
  FeedbackGain ref_gain{reference::example1_gain(), GainProvenance::StabPrior, std::nullopt};
  b.reference_gain_verification = verify_gain(set, ref_gain, options, cfg);
  return b;
}

Example2Bundle demo_example2(const NumericalConfig& cfg, double half_width, double step,
                             const SdpBackend& backend) {
  if (!(step > 0.0) || !(half_width >= 0.0)) {
    throw std::invalid_argument("example2 grid needs a positive step");
  }
  Example2Bundle b;
  b.trajectory = reference::example2_trajectory();
  const DataMatrices data = build_data_matrices(b.trajectory);
  b.report = check_sigma_stab(data, cfg, backend);
  const ConsistentSet set = consistent_set(data, cfg);

  // The consistent plane is x(1) = a x(0) + b u(0), i.e. a = (x1 - b u0) / x0.
  const double x0 = data.x_minus(0, 0);
  const double x1 = data.x_plus(0, 0);
  const auto count = static_cast<long>(std::llround(2.0 * half_width / step));
  for (long i = 0; i <= count; ++i) {
    for (long j = 0; j <= count; ++j) {
      PlanePoint pt;
      pt.b1 = -half_width + static_cast<double>(i) * step;
      pt.b2 = -half_width + static_cast<double>(j) * step;
      pt.a = (x1 - pt.b1 * data.u_minus(0, 0) - pt.b2 * data.u_minus(1, 0)) / x0;
      Matrix a(1, 1);
      a << pt.a;
      Matrix bm(1, 2);
      bm << pt.b1, pt.b2;
      if (!set.contains({a, bm}, cfg)) {
        throw std::logic_error("example2 grid point left the consistent plane");
      }
      pt.controllable = is_controllable(a, bm, cfg);
      b.grid.push_back(pt);
    }
  }
  return b;
}

ThreeTankBundle demo_three_tank(const NumericalConfig& cfg, const VerificationOptions& options,
                                const SdpBackend& backend) {
  ThreeTankBundle b;
  b.continuous = three_tank_model(ThreeTankParams{});
  b.discrete = zoh_discretize(b.continuous);
  b.table = reference::three_tank_table();
  b.simulated = simulate(b.discrete, b.table.states.front(), b.table.inputs);
  b.data = build_data_matrices(b.table);
  b.report = check_sigma_stab(b.data, cfg, backend);
  b.synthesis = synthesize_stab(b.data, cfg, K2Policy::zero(), backend);
  const Matrix closed = b.discrete.a + b.discrete.b * b.synthesis.gain.k;
  b.closed_loop_spectrum = eigenvalues(closed);
  b.closed_loop_rho = spectral_radius(closed);
  b.reference_gain_rho =
      spectral_radius(reference::three_tank_a() + reference::three_tank_b() * reference::three_tank_gain());
  b.verification = verify_gain(consistent_set(b.data, cfg), b.synthesis.gain, options, cfg);
  return b;
}

}  // namespace ddstab
