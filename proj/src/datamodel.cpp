#include "ddstab/datamodel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ddstab/errors.hpp"

namespace ddstab {

void TrajectoryData::validate() const {
  if (inputs.empty()) throw std::invalid_argument("trajectory needs at least one input sample");
  if (states.size() != inputs.size() + 1) {
    throw DimensionMismatch("trajectory has " + std::to_string(inputs.size()) + " inputs but " +
                            std::to_string(states.size()) + " states; expected " +
                            std::to_string(inputs.size() + 1));
  }
  const Index n_states = n();
  const Index n_inputs = m();
  if (n_states == 0) throw std::invalid_argument("state dimension must be positive");
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (states[t].size() != n_states) {
      throw DimensionMismatch("state x(" + std::to_string(t) + ") has size " +
                              std::to_string(states[t].size()) + ", expected " +
                              std::to_string(n_states));
    }
    if (!states[t].allFinite()) {
      throw std::invalid_argument("state x(" + std::to_string(t) + ") is not finite");
    }
  }
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (inputs[t].size() != n_inputs) {
      throw DimensionMismatch("input u(" + std::to_string(t) + ") has size " +
                              std::to_string(inputs[t].size()) + ", expected " +
                              std::to_string(n_inputs));
    }
    if (!inputs[t].allFinite()) {
      throw std::invalid_argument("input u(" + std::to_string(t) + ") is not finite");
    }
  }
}

Matrix DataMatrices::stacked() const {
  Matrix s(n() + m(), horizon());
  s << x_minus, u_minus;
  return s;
}

DataMatrices DataMatrices::first_samples(Index samples) const {
  if (samples < 1 || samples > horizon()) {
    throw std::out_of_range("first_samples: requested " + std::to_string(samples) +
                            " of " + std::to_string(horizon()) + " samples");
  }
  return {u_minus.leftCols(samples), x_minus.leftCols(samples), x_plus.leftCols(samples)};
}

DataMatrices DataMatrices::from_matrices(Matrix u_minus, Matrix x_minus, Matrix x_plus) {
  if (x_minus.rows() != x_plus.rows() || x_minus.cols() != x_plus.cols() ||
      u_minus.cols() != x_minus.cols()) {
    throw DimensionMismatch("data matrices: U- is m x T, X- and X+ are n x T");
  }
  if (x_minus.cols() < 1) throw std::invalid_argument("data matrices need T >= 1");
  return {std::move(u_minus), std::move(x_minus), std::move(x_plus)};
}

DataMatrices build_data_matrices(const TrajectoryData& traj) {
  traj.validate();
  const Index n = traj.n();
  const Index m = traj.m();
  const Index horizon = traj.horizon();
  DataMatrices d{Matrix(m, horizon), Matrix(n, horizon), Matrix(n, horizon)};
  for (Index t = 0; t < horizon; ++t) {
    d.u_minus.col(t) = traj.inputs[t];
    d.x_minus.col(t) = traj.states[t];
    d.x_plus.col(t) = traj.states[t + 1];
  }
  return d;
}

LtiSystem ConsistentSet::homogeneous(const Matrix& w) const {
  const Index n = source.n();
  const Index m = source.m();
  if (w.rows() != n || w.cols() != basis.dim()) {
    throw DimensionMismatch("W must be n x d");
  }
  if (basis.dim() == 0) return {Matrix::Zero(n, n), Matrix::Zero(n, m)};
  const Matrix ab = w * basis.q.transpose();
  return {ab.leftCols(n), ab.rightCols(m)};
}

LtiSystem ConsistentSet::member(const Matrix& w) const {
  LtiSystem h = homogeneous(w);
  return {particular.a + h.a, particular.b + h.b};
}

double ConsistentSet::residual(const LtiSystem& sys) const {
  return (source.x_plus - sys.a * source.x_minus - sys.b * source.u_minus).norm();
}

bool ConsistentSet::contains(const LtiSystem& sys, const NumericalConfig& cfg) const {
  return residual(sys) <= cfg.equality_tol * std::max(1.0, source.x_plus.norm());
}

ConsistentSet consistent_set(const DataMatrices& data, const NumericalConfig& cfg) {
  const Index n = data.n();
  const Matrix stacked = data.stacked();
  const Matrix ab = data.x_plus * pinv(stacked, cfg);
  ConsistentSet set;
  set.particular = {ab.leftCols(n), ab.rightCols(data.m())};
  set.basis.q = null_space_basis(stacked.transpose(), cfg);
  set.source = data;
  return set;
}

std::optional<LtiSystem> sample_consistent(const ConsistentSet& set, const Matrix& w,
                                           bool require_stabilizable,
                                           const NumericalConfig& cfg) {
  LtiSystem sys = set.member(w);
  if (require_stabilizable && !is_stabilizable(sys.a, sys.b, cfg)) return std::nullopt;
  return sys;
}

namespace {

Matrix reduced_stack(const DataMatrices& data, const RowCompression& comp) {
  Matrix s(comp.rank + data.m(), data.horizon());
  s << comp.x_hat_minus, data.u_minus;
  return s;
}

}  // namespace

ReachablePart reachable_part(const DataMatrices& data, const RowCompression& comp,
                             const NumericalConfig& cfg) {
  const Index r = comp.rank;
  const Index m = data.m();
  const Matrix stacked = reduced_stack(data, comp);
  const Index rank = numerical_rank(stacked, cfg);
  if (rank < r + m) {
    throw PreconditionViolated("reachable_part: rank [X^-; U-] = " + std::to_string(rank) +
                               " < r + m = " + std::to_string(r + m));
  }
  const Matrix ab = comp.x_hat_plus * pinv(stacked, cfg);
  return {ab.leftCols(r), ab.rightCols(m)};
}

Matrix recover_b(const DataMatrices& data, const RowCompression& comp,
                 const NumericalConfig& cfg) {
  const ReachablePart part = reachable_part(data, comp, cfg);
  Matrix sb = Matrix::Zero(data.n(), data.m());
  sb.topRows(comp.rank) = part.b1;
  return comp.S.partialPivLu().solve(sb);
}

}  // namespace ddstab
