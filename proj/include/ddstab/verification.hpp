#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ddstab/datamodel.hpp"
#include "ddstab/lmisynth.hpp"
#include "ddstab/matrixcore.hpp"
#include "ddstab/sdp.hpp"

namespace ddstab {

struct VerificationOptions {
  std::size_t samples_per_scale = 200;
  std::vector<double> scales{0.1, 1.0, 10.0};
  std::uint64_t seed = 0;
  /// Keep only stabilizable members. Defaults to true for gains synthesized with
  /// stabilizability prior knowledge and false for plain gains.
  std::optional<bool> filter_stabilizable;
};

/// Sampled check that A + BK is Schur over the consistent set. A pass is evidence; a
/// failure is a proof, witnessed by worst_member.
struct VerificationReport {
  std::size_t samples_tested = 0;
  std::size_t rejected_unstabilizable = 0;
  double max_spectral_radius = 0.0;
  std::optional<LtiSystem> worst_member;
  std::vector<double> structural_residuals;
  bool pass = true;

  std::uint64_t seed = 0;
  std::vector<double> scales;
  std::size_t samples_per_scale = 0;
  bool filtered = false;

  std::size_t accepted() const { return samples_tested - rejected_unstabilizable; }
  double max_structural_residual() const;
};

/// Draws `samples_per_scale` Gaussian coordinate matrices W at every scale (plus the
/// particular solution) and records rho(A + BK). Draw i of scale s uses its own stream
/// derived from (seed, s, i).
VerificationReport verify_gain(const ConsistentSet& set, const FeedbackGain& gain,
                               const VerificationOptions& options, const NumericalConfig& cfg);

/// max over homogeneous directions (A0, B0) of ||(A0 + B0 K) C(A, B)|| / ||C(A, B)||,
/// where C is the controllability matrix of `system`.
double structural_nullity(const ConsistentSet& set, const Matrix& k, const LtiSystem& system,
                          const NumericalConfig& cfg);

struct DecompositionDiagnostics {
  Matrix a11, a12, a21, a22;
  Matrix b1, b2;
  double a21_norm = 0.0;
  double b2_norm = 0.0;
  bool a22_schur = true;
  bool pair11_stabilizable = true;
  /// ||[A11 B1] - reachable_part(data)||, absent when the data do not determine it.
  std::optional<double> reachable_mismatch;
  bool pass = false;
};

/// Block-triangular split S A S^{-1}, S B of a consistent stabilizable system.
/// Throws PreconditionViolated when rank X- < n and conditions (a), (b) fail.
DecompositionDiagnostics decomposition_check(const DataMatrices& data,
                                             const RowCompression& comp,
                                             const LtiSystem& system, const NumericalConfig& cfg,
                                             double tolerance = 1e-6);

struct LyapunovCertificate {
  Matrix p;
  std::vector<double> decrease_margins;
};

struct LyapunovResult {
  LmiStatus status = LmiStatus::SolverFailure;
  double slack = 0.0;
  std::optional<LyapunovCertificate> certificate;
  std::string message;
};

/// Common P with P > 0 and P - M_i P M_i^T > 0 for every M_i (normalized by P <= I).
LyapunovResult common_lyapunov(std::span<const Matrix> closed_loops, const NumericalConfig& cfg,
                               const SdpBackend& backend = builtin_backend());

/// Number of alphas for which (M + alpha M0, N + alpha N0) is uncontrollable.
std::size_t genericity_probe(const Matrix& m, const Matrix& n, const Matrix& m0,
                             const Matrix& n0, std::span<const double> alphas,
                             const NumericalConfig& cfg);

}  // namespace ddstab
