#pragma once

#include <optional>
#include <vector>

#include "ddstab/matrixcore.hpp"

namespace ddstab {

/// Input/state samples of one experiment: T inputs and T+1 states.
struct TrajectoryData {
  std::vector<Vector> inputs;
  std::vector<Vector> states;

  Index n() const { return states.empty() ? 0 : states.front().size(); }
  Index m() const { return inputs.empty() ? 0 : inputs.front().size(); }
  Index horizon() const { return static_cast<Index>(inputs.size()); }

  /// Throws DimensionMismatch or std::invalid_argument when the invariants do not hold.
  void validate() const;
};

/// U-, X-, X+ built from one trajectory.
struct DataMatrices {
  Matrix u_minus;
  Matrix x_minus;
  Matrix x_plus;

  Index n() const { return x_minus.rows(); }
  Index m() const { return u_minus.rows(); }
  Index horizon() const { return x_minus.cols(); }

  /// [X-; U-]
  Matrix stacked() const;

  /// Data matrices restricted to the first `samples` columns.
  DataMatrices first_samples(Index samples) const;

  static DataMatrices from_matrices(Matrix u_minus, Matrix x_minus, Matrix x_plus);
};

struct LtiSystem {
  Matrix a;
  Matrix b;
};

/// Orthonormal basis of the left null space of [X-; U-].
struct NullBasis {
  Matrix q;
  Index dim() const { return q.cols(); }
};

/// All (A, B) with X+ = A X- + B U-, written as particular + span of the null basis.
struct ConsistentSet {
  LtiSystem particular;
  NullBasis basis;
  DataMatrices source;

  /// [A0 B0] = W Q^T split into its A and B parts; W is n x d.
  LtiSystem homogeneous(const Matrix& w) const;

  /// particular + homogeneous(W)
  LtiSystem member(const Matrix& w) const;

  /// ||X+ - A X- - B U-||_F
  double residual(const LtiSystem& sys) const;

  /// Residual bound equality_tol * max(1, ||X+||) used for membership.
  bool contains(const LtiSystem& sys, const NumericalConfig& cfg) const;
};

struct ReachablePart {
  Matrix a11;
  Matrix b1;
};

DataMatrices build_data_matrices(const TrajectoryData& traj);

ConsistentSet consistent_set(const DataMatrices& data, const NumericalConfig& cfg);

/// Consistent member for the coordinates W. Returns std::nullopt (a rejection, not an
/// error) when require_stabilizable is set and the member fails the PBH test.
std::optional<LtiSystem> sample_consistent(const ConsistentSet& set, const Matrix& w,
                                           bool require_stabilizable,
                                           const NumericalConfig& cfg);

/// [A11 B1] = X^+ [X^-; U-]^+. Throws PreconditionViolated unless [X^-; U-] has
/// full row rank r + m.
ReachablePart reachable_part(const DataMatrices& data, const RowCompression& comp,
                             const NumericalConfig& cfg);

/// B = S^{-1} [B1; 0], shared by every consistent system when the data are
/// informative under stabilizability with rank-deficient X-.
Matrix recover_b(const DataMatrices& data, const RowCompression& comp,
                 const NumericalConfig& cfg);

}  // namespace ddstab
