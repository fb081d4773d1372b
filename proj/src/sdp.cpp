#include "ddstab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddstab/errors.hpp"

namespace ddstab {

Matrix LmiBlock::evaluate(const Vector& x) const {
  Matrix g = constant;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (x(static_cast<Index>(i)) != 0.0) g += x(static_cast<Index>(i)) * coefficients[i];
  }
  return g;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// -sum log det G_j(x), or +inf outside the interior.
double barrier_value(const SdpProblem& p, const Vector& x) {
  double value = 0.0;
  for (const LmiBlock& block : p.blocks) {
    if (block.size() == 0) continue;
    Eigen::LLT<Matrix> llt(block.evaluate(x));
    if (llt.info() != Eigen::Success) return kInf;
    const auto diag = llt.matrixLLT().diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) return kInf;
    value -= 2.0 * diag.array().log().sum();
  }
  return value;
}

struct NewtonSystem {
  Vector gradient;
  Matrix hessian;
  bool ok = true;
};

NewtonSystem barrier_derivatives(const SdpProblem& p, const Vector& x, double tau) {
  const Index nv = p.num_vars();
  NewtonSystem sys{-tau * p.objective, Matrix::Zero(nv, nv), true};
  std::vector<Matrix> scaled(static_cast<std::size_t>(nv));
  for (const LmiBlock& block : p.blocks) {
    if (block.size() == 0) continue;
    Eigen::LLT<Matrix> llt(block.evaluate(x));
    if (llt.info() != Eigen::Success) {
      sys.ok = false;
      return sys;
    }
    const auto lower = llt.matrixL();
    for (Index i = 0; i < nv; ++i) {
      // W_i = L^{-1} F_i L^{-T}
      Matrix w = lower.solve(block.coefficients[static_cast<std::size_t>(i)]);
      w = lower.solve(w.transpose()).transpose();
      sys.gradient(i) -= w.trace();
      scaled[static_cast<std::size_t>(i)] = std::move(w);
    }
    for (Index i = 0; i < nv; ++i) {
      for (Index j = 0; j <= i; ++j) {
        const double h = scaled[static_cast<std::size_t>(i)].cwiseProduct(
                                                               scaled[static_cast<std::size_t>(j)])
                             .sum();
        sys.hessian(i, j) += h;
        if (i != j) sys.hessian(j, i) += h;
      }
    }
  }
  return sys;
}

}  // namespace

SdpResult BarrierSdpBackend::maximize(const SdpProblem& p, const SdpOptions& options) const {
  SdpResult result;
  const Index nv = p.num_vars();
  if (p.start.size() != nv) {
    throw DimensionMismatch("sdp: start point has the wrong number of variables");
  }
  for (const LmiBlock& block : p.blocks) {
    if (static_cast<Index>(block.coefficients.size()) != nv) {
      throw DimensionMismatch("sdp: every block needs one coefficient per variable");
    }
  }

  double nu = 0.0;
  for (const LmiBlock& block : p.blocks) nu += static_cast<double>(block.size());

  Vector x = p.start;
  if (!std::isfinite(barrier_value(p, x))) {
    result.message = "start point is not strictly feasible";
    return result;
  }
  result.x = x;
  result.objective = p.objective.dot(x);
  if (nv == 0 || nu == 0.0) {
    result.status = SdpStatus::Optimal;
    result.upper_bound = result.objective;
    return result;
  }

  constexpr double kGrowth = 8.0;
  constexpr double kCenteringTol = 1e-9;
  constexpr double kBacktrack = 0.5;

  // Initial tau: the value that best centers the start point, i.e. minimizes
  // ||-tau c + grad phi|| in the inverse Hessian norm.
  double tau = 1.0;
  {
    const NewtonSystem at_start = barrier_derivatives(p, x, 0.0);
    if (at_start.ok) {
      const Eigen::LDLT<Matrix> ldlt(at_start.hessian);
      const Vector hc = ldlt.solve(p.objective);
      const double num = -hc.dot(at_start.gradient);
      const double den = hc.dot(p.objective);
      if (std::isfinite(num) && std::isfinite(den) && num > 0.0 && den > 0.0) {
        tau = std::clamp(num / den, 1e-8, 1e8);
      }
    }
  }
  int steps = 0;
  bool certified = false;
  // Returns the last certified state, or a failure when no centering has completed.
  auto stall = [&](const char* why) {
    result.newton_steps = steps;
    result.message = why;
    if (!certified) return result;
    result.x = x;
    result.objective = p.objective.dot(x);
    result.status = SdpStatus::Stalled;
    return result;
  };
  for (;;) {
    // Centering: Newton's method on tau * (-c^T x) + barrier.
    for (int inner = 0;; ++inner) {
      if (steps >= options.max_newton_steps) return stall("Newton step budget exhausted");
      if (inner >= options.max_centering_steps) return stall("centering stalled");
      NewtonSystem sys = barrier_derivatives(p, x, tau);
      if (!sys.ok || !sys.gradient.allFinite() || !sys.hessian.allFinite()) {
        result.message = "lost strict feasibility";
        result.newton_steps = steps;
        return result;
      }
      Eigen::LDLT<Matrix> ldlt(sys.hessian);
      Vector dx = ldlt.solve(-sys.gradient);
      if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
        const double reg = 1e-12 * std::max(1.0, sys.hessian.diagonal().cwiseAbs().maxCoeff());
        dx = (sys.hessian + reg * Matrix::Identity(nv, nv)).ldlt().solve(-sys.gradient);
        if (!dx.allFinite()) {
          result.message = "singular Newton system";
          result.newton_steps = steps;
          return result;
        }
      }
      ++steps;
      const double decrement = -sys.gradient.dot(dx);
      if (decrement * 0.5 <= kCenteringTol) break;

      // Damped Newton step for a self-concordant barrier; only strict feasibility is checked,
      // so progress does not depend on comparing nearly equal barrier values.
      const double lambda = std::sqrt(std::max(decrement, 0.0));
      double s = lambda > 0.25 ? 1.0 / (1.0 + lambda) : 1.0;
      Vector trial = x + s * dx;
      for (int ls = 0; !std::isfinite(barrier_value(p, trial)); ++ls) {
        if (ls > 60) return stall("step could not keep strict feasibility");
        s *= kBacktrack;
        trial = x + s * dx;
      }
      x = trial;
      if (x.cwiseAbs().maxCoeff() > 1e15) {
        result.message = "iterates diverged (problem unbounded?)";
        result.newton_steps = steps;
        return result;
      }
    }

    const double objective = p.objective.dot(x);
    const double gap = nu / tau;
    result.x = x;
    result.objective = objective;
    result.upper_bound = objective + gap;
    result.newton_steps = steps;
    certified = true;
    if (options.decision_threshold && result.upper_bound < *options.decision_threshold) {
      result.status = SdpStatus::BelowThreshold;
      return result;
    }
    if (gap <= std::max(options.gap_abs_tol, options.gap_rel_tol * std::abs(objective))) {
      result.status = SdpStatus::Optimal;
      return result;
    }
    tau *= kGrowth;
  }
}

const SdpBackend& builtin_backend() {
  static const BarrierSdpBackend backend;
  return backend;
}

const SdpBackend* find_backend(std::string_view name) {
  if (name == "builtin" || name == "barrier") return &builtin_backend();
  return nullptr;
}

std::vector<std::string> backend_names() { return {"builtin"}; }

}  // namespace ddstab
