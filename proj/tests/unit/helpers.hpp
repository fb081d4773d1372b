#pragma once

#include <random>

#include "ddstab/datamodel.hpp"
#include "ddstab/experiments.hpp"
#include "ddstab/matrixcore.hpp"

namespace ddstab::testing {

inline Matrix mat(Index rows, Index cols, std::initializer_list<double> values) {
  Matrix m(rows, cols);
  Index k = 0;
  for (double v : values) {
    m(k / cols, k % cols) = v;
    ++k;
  }
  return m;
}

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = nd(gen);
  return m;
}

/// rows x cols matrix of rank `rank` (almost surely).
inline Matrix low_rank(Index rows, Index cols, Index rank, std::mt19937_64& gen) {
  return gaussian(rows, cols == 0 ? 0 : rank, gen) * gaussian(rank, cols, gen);
}

inline TrajectoryData random_trajectory(const LtiSystem& sys, Index horizon, std::mt19937_64& gen,
                                        double input_scale = 1.0) {
  const Matrix x0 = gaussian(sys.a.rows(), 1, gen);
  std::vector<Vector> inputs;
  for (Index t = 0; t < horizon; ++t) inputs.push_back(gaussian(sys.b.cols(), 1, gen, input_scale));
  return simulate(sys, x0.col(0), inputs);
}

/// Random system with spectral radius near `radius`; with probability `p_uncontrollable`
/// the last state is decoupled from the input.
inline LtiSystem random_system(Index n, Index m, std::mt19937_64& gen, double radius,
                               double p_uncontrollable = 0.0) {
  Matrix a = gaussian(n, n, gen);
  const double rho = spectral_radius(a);
  if (rho > 0.0) a *= radius / rho;
  Matrix b = gaussian(n, m, gen);
  std::bernoulli_distribution coin(p_uncontrollable);
  if (n > 1 && coin(gen)) {
    a.row(n - 1).head(n - 1).setZero();
    b.row(n - 1).setZero();
  }
  return {a, b};
}

}  // namespace ddstab::testing
