#include "ddstab/lmisynth.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "ddstab/errors.hpp"

namespace ddstab {

Matrix LmiFeasibilityProblem::block(const Matrix& theta) const {
  const Index k = var_cols();
  const Matrix lt = sym_lhs * theta;
  const Matrix sym = 0.5 * (lt + lt.transpose());
  const Matrix pt = block_top * theta;
  Matrix out(2 * k, 2 * k);
  out << sym, pt, pt.transpose(), sym;
  return out;
}

double LmiFeasibilityProblem::symmetry_residual(const Matrix& theta) const {
  const Matrix lt = sym_lhs * theta;
  return (lt - lt.transpose()).norm();
}

Matrix K2Policy::evaluate(Index m, Index cols) const {
  if (kind == Kind::Zero) return Matrix::Zero(m, cols);
  if (value.rows() != m || value.cols() != cols) {
    throw DimensionMismatch("K2 policy: fixed K2 must be m x (n - r)");
  }
  return value;
}

const char* to_string(LmiStatus status) {
  switch (status) {
    case LmiStatus::Feasible: return "feasible";
    case LmiStatus::Infeasible: return "infeasible";
    case LmiStatus::SolverFailure: return "solver_failure";
  }
  return "unknown";
}

const char* to_string(GainProvenance provenance) {
  return provenance == GainProvenance::Plain ? "plain" : "stab_prior";
}

LmiSolution sdp_solve(const LmiFeasibilityProblem& problem, const NumericalConfig& cfg,
                      const SdpBackend& backend) {
  const Matrix& l = problem.sym_lhs;
  const Matrix& p = problem.block_top;
  if (l.rows() != p.rows() || l.cols() != p.cols()) {
    throw DimensionMismatch("LMI: symmetric and off-diagonal data must have the same shape");
  }
  const Index k = problem.var_cols();
  const Index horizon = problem.var_rows();

  LmiSolution sol;
  sol.theta = Matrix::Zero(horizon, k);
  if (k == 0) {
    sol.status = LmiStatus::Feasible;
    sol.slack = 1.0;
    sol.slack_upper_bound = 1.0;
    sol.message = "empty problem";
    return sol;
  }

  // Theta only enters through [L; P] Theta, so restrict it to the row space of [L; P].
  // With a regressor given, also confine it to the regressor row space.
  Matrix lp(2 * k, horizon);
  lp << l, p;
  Matrix v;
  if (problem.theta_range.size() > 0) {
    if (problem.theta_range.cols() != horizon) {
      throw DimensionMismatch("LMI: Theta range rows must have one column per sample");
    }
    const Matrix range = orthonormal_basis(problem.theta_range.transpose(), cfg);
    v = range * orthonormal_basis((lp * range).transpose(), cfg);
  } else {
    v = orthonormal_basis(lp.transpose(), cfg);
  }
  const Index q = v.cols();
  const Matrix lr = l * v;
  const Matrix pr = p * v;

  // Linear constraints (L V Y)_{ij} = (L V Y)_{ji} on vec(Y), Y in R^{q x k}.
  const Index pairs = k * (k - 1) / 2;
  Matrix eq = Matrix::Zero(pairs, q * k);
  Index row = 0;
  for (Index i = 0; i < k; ++i) {
    for (Index j = i + 1; j < k; ++j, ++row) {
      for (Index a = 0; a < q; ++a) {
        eq(row, a + j * q) += lr(i, a);
        eq(row, a + i * q) -= lr(j, a);
      }
    }
  }
  const Matrix directions =
      pairs == 0 ? Matrix(Matrix::Identity(q * k, q * k)) : null_space_basis(eq, cfg);
  const Index nz = directions.cols();
  if (q == 0 || nz == 0) {
    sol.status = LmiStatus::Infeasible;
    sol.message = "no admissible Theta directions";
    return sol;
  }

  std::vector<Matrix> y_basis;
  std::vector<Matrix> f_basis;
  for (Index c = 0; c < nz; ++c) {
    Matrix y = Eigen::Map<const Matrix>(directions.col(c).data(), q, k);
    LmiFeasibilityProblem reduced{lr, pr};
    Matrix f = reduced.block(y);
    const double scale = f.norm();
    if (scale > 0.0) {
      y /= scale;
      f /= scale;
    }
    y_basis.push_back(std::move(y));
    f_basis.push_back(std::move(f));
  }

  // Normalize the homogeneous problem by tr(block) = 2k: with the scale fixed, infeasible
  // instances have a strictly negative optimum instead of a supremum of 0 at Theta = 0.
  const Index dim = 2 * k;
  const Matrix eye = Matrix::Identity(dim, dim);
  Vector traces(nz);
  for (Index c = 0; c < nz; ++c) traces(c) = f_basis[static_cast<std::size_t>(c)].trace();
  const double tnorm = traces.norm();
  if (tnorm <= cfg.equality_tol) {
    sol.status = LmiStatus::Infeasible;
    sol.message = "every admissible block is traceless";
    return sol;
  }
  const Vector z0 = traces * (static_cast<double>(dim) / (tnorm * tnorm));
  const Matrix free_dirs = null_space_basis(traces.transpose(), cfg);
  const Index nw = free_dirs.cols();

  auto combine = [&](const Vector& z) {
    Matrix f = Matrix::Zero(dim, dim);
    for (Index c = 0; c < nz; ++c) f += z(c) * f_basis[static_cast<std::size_t>(c)];
    return f;
  };
  SdpProblem sdp;
  sdp.objective = Vector::Zero(nw + 1);
  sdp.objective(nw) = 1.0;
  LmiBlock lower{combine(z0), {}};
  for (Index j = 0; j < nw; ++j) lower.coefficients.push_back(combine(free_dirs.col(j)));
  lower.coefficients.push_back(-eye);
  sdp.start = Vector::Zero(nw + 1);
  sdp.start(nw) = min_symmetric_eigenvalue(lower.constant) - 1.0;
  sdp.blocks = {std::move(lower)};

  SdpOptions options;
  options.decision_threshold = cfg.psd_margin;
  const SdpResult res = backend.maximize(sdp, options);
  sol.newton_steps = res.newton_steps;
  sol.message = res.message;

  Vector z = z0;
  if (res.x.size() == nw + 1) z += free_dirs * res.x.head(nw);
  Matrix y = Matrix::Zero(q, k);
  for (Index c = 0; c < nz; ++c) y += z(c) * y_basis[static_cast<std::size_t>(c)];
  sol.theta = v * y;
  sol.slack_upper_bound = res.upper_bound;

  switch (res.status) {
    case SdpStatus::Failure:
      sol.status = LmiStatus::SolverFailure;
      sol.slack = res.objective;
      return sol;
    case SdpStatus::BelowThreshold:
      sol.status = LmiStatus::Infeasible;
      sol.slack = res.objective;
      return sol;
    case SdpStatus::Stalled:
      if (res.objective >= cfg.psd_margin) break;
      sol.slack = res.objective;
      if (res.upper_bound < cfg.psd_margin) {
        sol.status = LmiStatus::Infeasible;
      } else {
        sol.status = LmiStatus::SolverFailure;
        sol.message += "; optimum undecided near the acceptance margin";
      }
      return sol;
    case SdpStatus::Optimal:
      break;
  }

  sol.slack = min_symmetric_eigenvalue(problem.block(sol.theta));
  const bool symmetric = problem.symmetry_residual(sol.theta) <= cfg.equality_tol;
  if (res.objective < cfg.psd_margin) {
    sol.status = LmiStatus::Infeasible;
  } else if (sol.slack >= cfg.psd_margin && symmetric) {
    sol.status = LmiStatus::Feasible;
  } else {
    sol.status = LmiStatus::SolverFailure;
    sol.message = "witness failed verification after reconstruction";
  }
  return sol;
}

LmiFeasibilityProblem plain_problem(const DataMatrices& data) {
  return {data.x_minus, data.x_plus, data.stacked()};
}

LmiFeasibilityProblem stab_problem(const DataMatrices& data, const RowCompression& comp) {
  Matrix regressor(comp.x_hat_minus.rows() + data.u_minus.rows(), data.horizon());
  regressor << comp.x_hat_minus, data.u_minus;
  return {comp.x_hat_minus, comp.x_hat_plus, regressor};
}

LmiSolution solve_plain_lmi(const DataMatrices& data, const NumericalConfig& cfg,
                            const SdpBackend& backend) {
  return sdp_solve(plain_problem(data), cfg, backend);
}

LmiSolution solve_stab_lmi(const DataMatrices& data, const RowCompression& comp,
                           const NumericalConfig& cfg, const SdpBackend& backend) {
  if (comp.x_hat_minus.cols() != data.horizon()) {
    throw DimensionMismatch("solve_stab_lmi: compression does not match the data horizon");
  }
  return sdp_solve(stab_problem(data, comp), cfg, backend);
}

namespace {

// U- Theta (L Theta)^{-1}, with L Theta required to be symmetric positive definite.
Matrix gain_block(const Matrix& u_minus, const Matrix& l, const Matrix& theta) {
  const Matrix lt = l * theta;
  const Matrix sym = 0.5 * (lt + lt.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw PreconditionViolated("gain: L Theta is not positive definite");
  }
  const Matrix ut = u_minus * theta;
  return llt.solve(ut.transpose()).transpose();
}

}  // namespace

FeedbackGain gain_from_plain(const DataMatrices& data, const LmiSolution& sol) {
  if (!sol.feasible()) {
    throw PreconditionViolated(std::string("gain_from_plain: LMI solution is ") +
                               to_string(sol.status));
  }
  FeedbackGain gain;
  gain.k = gain_block(data.u_minus, data.x_minus, sol.theta);
  gain.provenance = GainProvenance::Plain;
  return gain;
}

FeedbackGain gain_from_stab(const DataMatrices& data, const RowCompression& comp,
                            const LmiSolution& sol, const K2Policy& k2_policy) {
  if (!sol.feasible()) {
    throw PreconditionViolated(std::string("gain_from_stab: LMI solution is ") +
                               to_string(sol.status));
  }
  const Index n = data.n();
  const Index m = data.m();
  const Index r = comp.rank;
  Matrix k12(m, n);
  if (r > 0) k12.leftCols(r) = gain_block(data.u_minus, comp.x_hat_minus, sol.theta);
  k12.rightCols(n - r) = k2_policy.evaluate(m, n - r);
  FeedbackGain gain;
  gain.k = k12 * comp.S;
  gain.provenance = GainProvenance::StabPrior;
  gain.k2_policy = k2_policy;
  return gain;
}

StabSynthesis synthesize_stab(const DataMatrices& data, const NumericalConfig& cfg,
                              const K2Policy& k2_policy, const SdpBackend& backend) {
  StabSynthesis out;
  out.compression = row_compress(data.x_minus, data.x_plus, cfg);
  out.solution = solve_stab_lmi(data, out.compression, cfg, backend);
  if (!out.solution.feasible()) {
    throw PreconditionViolated(std::string("synthesize_stab: reduced LMI is ") +
                               to_string(out.solution.status));
  }
  out.gain = gain_from_stab(data, out.compression, out.solution, k2_policy);
  const Index r = out.compression.rank;
  out.k1 = (out.gain.k * out.compression.S.transpose()).leftCols(r);
  return out;
}

namespace {

void write_double(std::ostream& os, double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  os.write(buf.data(), end - buf.data());
}

void write_matrix(std::ostream& os, const char* key, const Matrix& m) {
  os << "\"" << key << "\":{\"rows\":" << m.rows() << ",\"cols\":" << m.cols() << ",\"data\":[";
  bool first = true;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (!first) os << ',';
      first = false;
      write_double(os, m(i, j));
    }
  }
  os << "]}";
}

}  // namespace

std::string dump_problem_json(const LmiFeasibilityProblem& problem) {
  std::ostringstream os;
  os << "{\"variable\":{\"rows\":" << problem.var_rows() << ",\"cols\":" << problem.var_cols()
     << "},";
  write_matrix(os, "sym_lhs", problem.sym_lhs);
  os << ',';
  write_matrix(os, "block_top", problem.block_top);
  if (problem.theta_range.size() > 0) {
    os << ',';
    write_matrix(os, "theta_range", problem.theta_range);
  }
  os << ",\"objective\":\"maximize t s.t. L*Theta symmetric, tr(L*Theta) = k, "
        "[[L*Theta, P*Theta], [(P*Theta)^T, L*Theta]] >= t*I\"}\n";
  return os.str();
}

}  // namespace ddstab
