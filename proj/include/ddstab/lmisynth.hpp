#pragma once

#include <optional>
#include <string>

#include "ddstab/datamodel.hpp"
#include "ddstab/matrixcore.hpp"
#include "ddstab/sdp.hpp"

namespace ddstab {

/// Find Theta (T x k) with L Theta symmetric and
///   [[L Theta, P Theta], [(P Theta)^T, L Theta]] >= t I,
/// maximizing t. L is k x T (X- or X^-), P is k x T (X+ or X^+).
///
/// The homogeneous problem is normalized by tr(block) = 2k, so the reported slack is the
/// smallest eigenvalue relative to a mean eigenvalue of 1: scale free, at most 1, and
/// strictly negative on infeasible data.
struct LmiFeasibilityProblem {
  Matrix sym_lhs;
  Matrix block_top;
  /// When non-empty, Theta is confined to the row space of these rows (T columns).
  Matrix theta_range = Matrix();

  Index var_rows() const { return sym_lhs.cols(); }
  Index var_cols() const { return sym_lhs.rows(); }

  /// The 2k x 2k block for a given Theta.
  Matrix block(const Matrix& theta) const;
  double symmetry_residual(const Matrix& theta) const;
};

enum class LmiStatus { Feasible, Infeasible, SolverFailure };

struct LmiSolution {
  Matrix theta;
  double slack = 0.0;
  /// Upper bound on the optimal slack certified by the backend.
  double slack_upper_bound = 0.0;
  LmiStatus status = LmiStatus::SolverFailure;
  int newton_steps = 0;
  std::string message;

  bool feasible() const { return status == LmiStatus::Feasible; }
};

enum class GainProvenance { Plain, StabPrior };

/// How the unconstrained K2 block is chosen.
struct K2Policy {
  enum class Kind { Zero, Fixed };
  Kind kind = Kind::Zero;
  Matrix value;

  static K2Policy zero() { return {}; }
  static K2Policy fixed(Matrix k2) { return {Kind::Fixed, std::move(k2)}; }
  Matrix evaluate(Index m, Index cols) const;
};

struct FeedbackGain {
  Matrix k;
  GainProvenance provenance = GainProvenance::Plain;
  std::optional<K2Policy> k2_policy;
};

struct StabSynthesis {
  FeedbackGain gain;
  Matrix k1;
  LmiSolution solution;
  RowCompression compression;
};

const char* to_string(LmiStatus status);
const char* to_string(GainProvenance provenance);

LmiSolution sdp_solve(const LmiFeasibilityProblem& problem, const NumericalConfig& cfg,
                      const SdpBackend& backend = builtin_backend());

LmiFeasibilityProblem plain_problem(const DataMatrices& data);
LmiFeasibilityProblem stab_problem(const DataMatrices& data, const RowCompression& comp);

LmiSolution solve_plain_lmi(const DataMatrices& data, const NumericalConfig& cfg,
                            const SdpBackend& backend = builtin_backend());

/// K = U- Theta (X- Theta)^{-1}. Throws PreconditionViolated for non-feasible solutions.
FeedbackGain gain_from_plain(const DataMatrices& data, const LmiSolution& sol);

LmiSolution solve_stab_lmi(const DataMatrices& data, const RowCompression& comp,
                           const NumericalConfig& cfg,
                           const SdpBackend& backend = builtin_backend());

/// K = [K1 K2] S with K1 = U- Theta (X^- Theta)^{-1} and K2 from the policy.
FeedbackGain gain_from_stab(const DataMatrices& data, const RowCompression& comp,
                            const LmiSolution& sol, const K2Policy& k2_policy);

/// Row compression, the reduced LMI and gain assembly in one call. Throws
/// PreconditionViolated when the reduced LMI is not feasible.
StabSynthesis synthesize_stab(const DataMatrices& data, const NumericalConfig& cfg,
                              const K2Policy& k2_policy = K2Policy::zero(),
                              const SdpBackend& backend = builtin_backend());

/// Debug dump of a problem: shapes and row-major constraint matrices, doubles written in
/// shortest round-trip form.
std::string dump_problem_json(const LmiFeasibilityProblem& problem);

}  // namespace ddstab
