#include "ddstab/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ddstab/errors.hpp"
#include "ddstab/rng.hpp"

namespace ddstab {

double VerificationReport::max_structural_residual() const {
  if (structural_residuals.empty()) return 0.0;
  return *std::max_element(structural_residuals.begin(), structural_residuals.end());
}

double structural_nullity(const ConsistentSet& set, const Matrix& k, const LtiSystem& system,
                          const NumericalConfig& /*cfg*/) {
  const Index n = set.source.n();
  const Matrix ctrb = controllability_matrix(system.a, system.b);
  const double scale = ctrb.norm();
  if (scale == 0.0 || set.basis.dim() == 0) return 0.0;
  // (A0 + B0 K) for [A0 B0] = e_i q_j^T is e_i (q_A^T + q_B^T K), so every row index i
  // gives the same norm and only the directions q_j matter.
  double worst = 0.0;
  for (Index j = 0; j < set.basis.dim(); ++j) {
    const auto q = set.basis.q.col(j);
    const Eigen::RowVectorXd v = q.head(n).transpose() + q.tail(set.source.m()).transpose() * k;
    worst = std::max(worst, (v * ctrb).norm() / scale);
  }
  return worst;
}

VerificationReport verify_gain(const ConsistentSet& set, const FeedbackGain& gain,
                               const VerificationOptions& options, const NumericalConfig& cfg) {
  const Index n = set.source.n();
  if (gain.k.rows() != set.source.m() || gain.k.cols() != n) {
    throw DimensionMismatch("verify_gain: K must be m x n");
  }
  VerificationReport rep;
  rep.seed = options.seed;
  rep.scales = options.scales;
  rep.samples_per_scale = options.samples_per_scale;
  rep.filtered = options.filter_stabilizable.value_or(gain.provenance == GainProvenance::StabPrior);
  rep.max_spectral_radius = 0.0;

  auto consider = [&](const Matrix& w) {
    ++rep.samples_tested;
    const LtiSystem sys = set.member(w);
    const bool stabilizable = is_stabilizable(sys.a, sys.b, cfg);
    if (rep.filtered && !stabilizable) {
      ++rep.rejected_unstabilizable;
      return;
    }
    const double rho = spectral_radius(sys.a + sys.b * gain.k);
    if (!rep.worst_member || rho > rep.max_spectral_radius) {
      rep.max_spectral_radius = rho;
      rep.worst_member = sys;
    }
    if (stabilizable) rep.structural_residuals.push_back(structural_nullity(set, gain.k, sys, cfg));
  };

  const Index d = set.basis.dim();
  consider(Matrix::Zero(n, d));
  for (std::size_t s = 0; s < options.scales.size(); ++s) {
    const double scale = options.scales[s];
    for (std::size_t i = 0; i < options.samples_per_scale; ++i) {
      auto gen = stream_engine(options.seed, (static_cast<std::uint64_t>(s) << 32) | i);
      std::normal_distribution<double> normal(0.0, scale);
      Matrix w(n, d);
      for (Index c = 0; c < w.size(); ++c) w.data()[c] = normal(gen);
      consider(w);
    }
  }
  rep.pass = rep.max_spectral_radius <= 1.0 - cfg.schur_margin;
  return rep;
}

DecompositionDiagnostics decomposition_check(const DataMatrices& data,
                                             const RowCompression& comp,
                                             const LtiSystem& system, const NumericalConfig& cfg,
                                             double tolerance) {
  const Index n = data.n();
  const Index r = comp.rank;
  if (r < n) {
    if (!subspace_contained(data.x_plus, data.x_minus, cfg)) {
      throw PreconditionViolated("decomposition_check: im X+ is not contained in im X-");
    }
    if (numerical_rank(data.stacked(), cfg) != r + data.m()) {
      throw PreconditionViolated("decomposition_check: rank [X-; U-] != rank X- + m");
    }
  }
  const Eigen::PartialPivLU<Matrix> s_lu(comp.S);
  const Matrix sas = comp.S * s_lu.solve(system.a.transpose()).transpose();
  const Matrix sb = comp.S * system.b;
  const Index rest = n - r;

  DecompositionDiagnostics out;
  out.a11 = sas.topLeftCorner(r, r);
  out.a12 = sas.topRightCorner(r, rest);
  out.a21 = sas.bottomLeftCorner(rest, r);
  out.a22 = sas.bottomRightCorner(rest, rest);
  out.b1 = sb.topRows(r);
  out.b2 = sb.bottomRows(rest);
  out.a21_norm = out.a21.norm();
  out.b2_norm = out.b2.norm();
  out.a22_schur = is_schur(out.a22, cfg);
  out.pair11_stabilizable = is_stabilizable(out.a11, out.b1, cfg);

  Matrix reduced(r + data.m(), data.horizon());
  reduced << comp.x_hat_minus, data.u_minus;
  if (numerical_rank(reduced, cfg) == r + data.m()) {
    const ReachablePart part = reachable_part(data, comp, cfg);
    Matrix lhs(r, r + data.m());
    lhs << out.a11, out.b1;
    Matrix rhs(r, r + data.m());
    rhs << part.a11, part.b1;
    out.reachable_mismatch = (lhs - rhs).norm();
  }

  out.pass = out.a21_norm <= tolerance && out.b2_norm <= tolerance && out.a22_schur &&
             out.pair11_stabilizable &&
             (!out.reachable_mismatch || *out.reachable_mismatch <= tolerance);
  return out;
}

LyapunovResult common_lyapunov(std::span<const Matrix> closed_loops, const NumericalConfig& cfg,
                               const SdpBackend& backend) {
  LyapunovResult result;
  if (closed_loops.empty()) throw std::invalid_argument("common_lyapunov: empty family");
  const Index n = closed_loops.front().rows();
  for (const Matrix& m : closed_loops) {
    if (m.rows() != n || m.cols() != n) {
      throw DimensionMismatch("common_lyapunov: all matrices must be square of equal size");
    }
  }

  // Symmetric basis for P.
  std::vector<Matrix> basis;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b) {
      Matrix e = Matrix::Zero(n, n);
      if (a == b) {
        e(a, a) = 1.0;
      } else {
        e(a, b) = e(b, a) = 1.0 / std::sqrt(2.0);
      }
      basis.push_back(std::move(e));
    }
  }
  const Index np = static_cast<Index>(basis.size());
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix zero = Matrix::Zero(n, n);

  SdpProblem sdp;
  sdp.objective = Vector::Zero(np + 1);
  sdp.objective(np) = 1.0;

  LmiBlock positivity{zero, basis};
  positivity.coefficients.push_back(-eye);
  sdp.blocks.push_back(std::move(positivity));
  for (const Matrix& m : closed_loops) {
    LmiBlock decrease{zero, {}};
    for (const Matrix& e : basis) decrease.coefficients.push_back(e - m * e * m.transpose());
    decrease.coefficients.push_back(-eye);
    sdp.blocks.push_back(std::move(decrease));
  }
  LmiBlock bound{eye, {}};
  for (const Matrix& e : basis) bound.coefficients.push_back(-e);
  bound.coefficients.push_back(zero);
  sdp.blocks.push_back(std::move(bound));

  // P = I/2 and t below every block's smallest eigenvalue.
  sdp.start = Vector::Zero(np + 1);
  Index idx = 0;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b, ++idx) {
      if (a == b) sdp.start(idx) = 0.5;
    }
  }
  double lowest = 0.5;
  for (const Matrix& m : closed_loops) {
    lowest = std::min(lowest, min_symmetric_eigenvalue(0.5 * (eye - m * m.transpose())));
  }
  sdp.start(np) = lowest - 1.0;

  SdpOptions options;
  options.decision_threshold = cfg.psd_margin;
  const SdpResult res = backend.maximize(sdp, options);
  result.message = res.message;
  result.slack = res.objective;
  if (res.status == SdpStatus::Failure) {
    result.status = LmiStatus::SolverFailure;
    return result;
  }
  if (res.status == SdpStatus::Stalled && res.objective < cfg.psd_margin &&
      res.upper_bound >= cfg.psd_margin) {
    result.status = LmiStatus::SolverFailure;
    return result;
  }
  if (res.status == SdpStatus::BelowThreshold || res.objective < cfg.psd_margin) {
    result.status = LmiStatus::Infeasible;
    return result;
  }

  Matrix p = Matrix::Zero(n, n);
  for (Index i = 0; i < np; ++i) p += res.x(i) * basis[static_cast<std::size_t>(i)];
  LyapunovCertificate cert{p, {}};
  double worst = min_symmetric_eigenvalue(p);
  for (const Matrix& m : closed_loops) {
    const double margin = min_symmetric_eigenvalue(p - m * p * m.transpose());
    cert.decrease_margins.push_back(margin);
    worst = std::min(worst, margin);
  }
  if (worst <= 0.0) {
    result.status = LmiStatus::SolverFailure;
    result.message = "certificate failed verification";
    return result;
  }
  result.status = LmiStatus::Feasible;
  result.certificate = std::move(cert);
  return result;
}

std::size_t genericity_probe(const Matrix& m, const Matrix& n, const Matrix& m0,
                             const Matrix& n0, std::span<const double> alphas,
                             const NumericalConfig& cfg) {
  if (m0.rows() != m.rows() || m0.cols() != m.cols() || n0.rows() != n.rows() ||
      n0.cols() != n.cols()) {
    throw DimensionMismatch("genericity_probe: direction must match the base pair");
  }
  if (!is_controllable(m, n, cfg)) {
    throw PreconditionViolated("genericity_probe: base pair must be controllable");
  }
  std::size_t count = 0;
  for (double alpha : alphas) {
    if (!is_controllable(m + alpha * m0, n + alpha * n0, cfg)) ++count;
  }
  return count;
}

}  // namespace ddstab
