#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ddstab/datamodel.hpp"
#include "ddstab/lmisynth.hpp"
#include "ddstab/matrixcore.hpp"
#include "ddstab/sdp.hpp"

namespace ddstab {

enum class Branch { FullRank, RankDeficient };

const char* to_string(Branch branch);

struct InformativityDiagnostics {
  Vector x_minus_singular_values;
  double rank_threshold = 0.0;
  /// Some singular value of X- lies within a factor 100 of the rank threshold.
  bool marginal_rank = false;
  Index rank_stacked = 0;
  /// Dimension of the homogeneous solution set (left null space of [X-; U-]).
  Index null_dim = 0;
  double condition_a_residual = 0.0;
  LmiStatus plain_status = LmiStatus::SolverFailure;
  double plain_slack = 0.0;
  std::string plain_message;
};

struct InformativityReport {
  Index n = 0;
  Index m = 0;
  Index horizon = 0;
  Index rank_x_minus = 0;
  bool ident = false;
  bool plain_stab = false;
  std::optional<Matrix> plain_theta;
  bool sigma_cont_stab = false;
  bool sigma_stab = false;
  Branch branch = Branch::FullRank;
  bool condition_a = false;
  /// Stacked-image identity; vacuously true on the full-rank branch.
  bool condition_b = false;
  InformativityDiagnostics diagnostics;

  bool solver_failure() const { return diagnostics.plain_status == LmiStatus::SolverFailure; }
};

struct PlainCheck {
  bool informative = false;
  LmiSolution solution;

  std::optional<Matrix> witness() const {
    return informative ? std::optional<Matrix>(solution.theta) : std::nullopt;
  }
};

/// rank [X-; U-] = n + m
bool check_identification(const DataMatrices& data, const NumericalConfig& cfg);

/// Feasibility of the full-order data LMI. A solver failure is reported through
/// solution.status and never counts as informative.
PlainCheck check_plain_stabilization(const DataMatrices& data, const NumericalConfig& cfg,
                                     const SdpBackend& backend = builtin_backend());

/// Informativity under controllability prior knowledge; equal to the plain verdict.
PlainCheck check_sigma_cont(const DataMatrices& data, const NumericalConfig& cfg,
                            const SdpBackend& backend = builtin_backend());

/// im X+ contained in im X-.
bool check_condition_a(const DataMatrices& data, const NumericalConfig& cfg);

/// rank [X-; U-] = r + m. Throws PreconditionViolated when rank X- = n.
bool check_condition_b(const DataMatrices& data, const RowCompression& comp,
                       const NumericalConfig& cfg);

/// Full report; selects the branch from rank X-.
InformativityReport check_sigma_stab(const DataMatrices& data, const NumericalConfig& cfg,
                                     const SdpBackend& backend = builtin_backend());

/// Gain-free necessary conditions for informativity under stabilizability prior knowledge.
struct NecessaryConditions {
  bool image_inclusion = false;
  /// Vacuously true when rank X- = n.
  bool stacked_image_identity = false;
  bool invariance_particular = false;
  std::size_t members_checked = 0;
  std::size_t members_invariant = 0;
  double max_invariance_residual = 0.0;

  bool invariance_all() const {
    return invariance_particular && members_invariant == members_checked;
  }
  bool all_hold() const { return image_inclusion && stacked_image_identity && invariance_all(); }
};

/// Checks A im X- within im X- and im B within im X- on the particular solution and on
/// `samples` Gaussian members of the consistent set.
NecessaryConditions necessary_conditions_report(const DataMatrices& data,
                                                const NumericalConfig& cfg,
                                                std::size_t samples = 20,
                                                std::uint64_t seed = 0);

}  // namespace ddstab
