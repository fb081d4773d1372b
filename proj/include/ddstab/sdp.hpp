#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddstab/matrixcore.hpp"

namespace ddstab {

/// G(x) = constant + sum_i x_i * coefficients[i], constrained to be positive semidefinite.
/// All matrices are symmetric and share one size.
struct LmiBlock {
  Matrix constant;
  std::vector<Matrix> coefficients;

  Index size() const { return constant.rows(); }
  Matrix evaluate(const Vector& x) const;
};

/// maximize objective^T x  subject to every block being PSD.
/// `start` must make every block positive definite.
struct SdpProblem {
  Vector objective;
  std::vector<LmiBlock> blocks;
  Vector start;

  Index num_vars() const { return objective.size(); }
};

struct SdpOptions {
  double gap_abs_tol = 1e-11;
  double gap_rel_tol = 1e-7;
  /// When set, the solve stops as soon as the optimum is certified to lie below this value.
  std::optional<double> decision_threshold;
  int max_newton_steps = 4000;
  /// Newton steps allowed for one centering before the path is declared stalled.
  int max_centering_steps = 200;
};

/// Stalled: progress stopped at the precision limit before the gap tolerance was met. x is
/// strictly feasible and upper_bound is the bound of the last completed centering.
enum class SdpStatus { Optimal, BelowThreshold, Stalled, Failure };

struct SdpResult {
  SdpStatus status = SdpStatus::Failure;
  Vector x;
  double objective = 0.0;
  /// Certified upper bound on the optimal objective (objective + duality gap).
  double upper_bound = 0.0;
  int newton_steps = 0;
  std::string message;
};

/// Pluggable semidefinite feasibility backend.
class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual std::string name() const = 0;
  virtual SdpResult maximize(const SdpProblem& problem, const SdpOptions& options) const = 0;
};

/// Dense primal log-barrier path-following method. Intended for desk-scale problems
/// (a few dozen variables, blocks up to ~40 x 40).
class BarrierSdpBackend final : public SdpBackend {
 public:
  std::string name() const override { return "builtin"; }
  SdpResult maximize(const SdpProblem& problem, const SdpOptions& options) const override;
};

const SdpBackend& builtin_backend();

/// Looks a backend up by name; returns nullptr for unknown names.
const SdpBackend* find_backend(std::string_view name);

std::vector<std::string> backend_names();

}  // namespace ddstab
