#include "ddstab/informativity.hpp"

#include <algorithm>
#include <random>

#include "ddstab/errors.hpp"
#include "ddstab/rng.hpp"

namespace ddstab {

const char* to_string(Branch branch) {
  return branch == Branch::FullRank ? "full_rank" : "rank_deficient";
}

bool check_identification(const DataMatrices& data, const NumericalConfig& cfg) {
  return numerical_rank(data.stacked(), cfg) == data.n() + data.m();
}

PlainCheck check_plain_stabilization(const DataMatrices& data, const NumericalConfig& cfg,
                                     const SdpBackend& backend) {
  PlainCheck check;
  check.solution = solve_plain_lmi(data, cfg, backend);
  check.informative = check.solution.feasible();
  return check;
}

PlainCheck check_sigma_cont(const DataMatrices& data, const NumericalConfig& cfg,
                            const SdpBackend& backend) {
  return check_plain_stabilization(data, cfg, backend);
}

bool check_condition_a(const DataMatrices& data, const NumericalConfig& cfg) {
  return subspace_contained(data.x_plus, data.x_minus, cfg);
}

namespace {

bool stacked_rank_identity(const DataMatrices& data, Index r, const NumericalConfig& cfg) {
  return numerical_rank(data.stacked(), cfg) == r + data.m();
}

}  // namespace

bool check_condition_b(const DataMatrices& data, const RowCompression& comp,
                       const NumericalConfig& cfg) {
  if (comp.rank >= data.n()) {
    throw PreconditionViolated("check_condition_b: rank X- = n, the condition applies to "
                               "rank-deficient state data only");
  }
  return stacked_rank_identity(data, comp.rank, cfg);
}

InformativityReport check_sigma_stab(const DataMatrices& data, const NumericalConfig& cfg,
                                     const SdpBackend& backend) {
  InformativityReport rep;
  rep.n = data.n();
  rep.m = data.m();
  rep.horizon = data.horizon();

  auto& diag = rep.diagnostics;
  diag.x_minus_singular_values = singular_values(data.x_minus);
  const auto& sv = diag.x_minus_singular_values;
  if (sv.size() > 0 && sv(0) > 0.0) {
    diag.rank_threshold = rank_threshold(sv(0), data.x_minus.rows(), data.x_minus.cols(), cfg);
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > diag.rank_threshold / 100.0 && sv(i) <= diag.rank_threshold * 100.0) {
        diag.marginal_rank = true;
      }
    }
  }

  const Matrix stacked = data.stacked();
  diag.rank_stacked = numerical_rank(stacked, cfg);
  diag.null_dim = rep.n + rep.m - diag.rank_stacked;
  rep.ident = diag.rank_stacked == rep.n + rep.m;

  const PlainCheck plain = check_plain_stabilization(data, cfg, backend);
  rep.plain_stab = plain.informative;
  rep.plain_theta = plain.witness();
  rep.sigma_cont_stab = rep.plain_stab;
  diag.plain_status = plain.solution.status;
  diag.plain_slack = plain.solution.slack;
  diag.plain_message = plain.solution.message;

  const RowCompression comp = row_compress(data.x_minus, data.x_plus, cfg);
  rep.rank_x_minus = comp.rank;
  diag.condition_a_residual = subspace_residual(data.x_plus, data.x_minus, cfg);
  rep.condition_a = check_condition_a(data, cfg);

  if (comp.rank == rep.n) {
    rep.branch = Branch::FullRank;
    rep.condition_b = true;
    rep.sigma_stab = rep.plain_stab;
  } else {
    rep.branch = Branch::RankDeficient;
    rep.condition_b = check_condition_b(data, comp, cfg);
    rep.sigma_stab = rep.condition_a && rep.condition_b;
  }
  return rep;
}

NecessaryConditions necessary_conditions_report(const DataMatrices& data,
                                                const NumericalConfig& cfg,
                                                std::size_t samples, std::uint64_t seed) {
  NecessaryConditions out;
  out.image_inclusion = check_condition_a(data, cfg);
  const Index r = numerical_rank(data.x_minus, cfg);
  out.stacked_image_identity = r == data.n() || stacked_rank_identity(data, r, cfg);

  const ConsistentSet set = consistent_set(data, cfg);
  auto invariance_residual = [&](const LtiSystem& sys) {
    return std::max(subspace_residual(sys.a * data.x_minus, data.x_minus, cfg),
                    subspace_residual(sys.b, data.x_minus, cfg));
  };
  auto invariant = [&](const LtiSystem& sys) {
    return subspace_contained(sys.a * data.x_minus, data.x_minus, cfg) &&
           subspace_contained(sys.b, data.x_minus, cfg);
  };

  out.invariance_particular = invariant(set.particular);
  out.max_invariance_residual = invariance_residual(set.particular);
  for (std::size_t i = 0; i < samples; ++i) {
    auto gen = stream_engine(seed, i);
    std::normal_distribution<double> normal;
    Matrix w(data.n(), set.basis.dim());
    for (Index c = 0; c < w.size(); ++c) w.data()[c] = normal(gen);
    const LtiSystem sys = set.member(w);
    ++out.members_checked;
    if (invariant(sys)) ++out.members_invariant;
    out.max_invariance_residual = std::max(out.max_invariance_residual, invariance_residual(sys));
  }
  return out;
}

}  // namespace ddstab
