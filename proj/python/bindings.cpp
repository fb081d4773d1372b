#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ddstab/errors.hpp"
#include "ddstab/experiments.hpp"
#include "ddstab/informativity.hpp"
#include "ddstab/io.hpp"
#include "ddstab/lmisynth.hpp"
#include "ddstab/verification.hpp"

namespace py = pybind11;
using namespace ddstab;

namespace {

const NumericalConfig kDefaults{};

K2Policy k2_from(const std::optional<Matrix>& k2) {
  return k2 ? K2Policy::fixed(*k2) : K2Policy::zero();
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Informativity checks, LMI gain synthesis and sampled verification.";

  py::register_exception<PreconditionViolated>(mod, "PreconditionViolated", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(mod, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<ParseError>(mod, "ParseError", PyExc_ValueError);

  py::class_<NumericalConfig>(mod, "NumericalConfig")
      .def(py::init<>())
      .def_readwrite("rank_rel_tol", &NumericalConfig::rank_rel_tol)
      .def_readwrite("subspace_tol", &NumericalConfig::subspace_tol)
      .def_readwrite("schur_margin", &NumericalConfig::schur_margin)
      .def_readwrite("psd_margin", &NumericalConfig::psd_margin)
      .def_readwrite("equality_tol", &NumericalConfig::equality_tol)
      .def("validate", &NumericalConfig::validate);

  py::enum_<Branch>(mod, "Branch")
      .value("FullRank", Branch::FullRank)
      .value("RankDeficient", Branch::RankDeficient);
  py::enum_<LmiStatus>(mod, "LmiStatus")
      .value("Feasible", LmiStatus::Feasible)
      .value("Infeasible", LmiStatus::Infeasible)
      .value("SolverFailure", LmiStatus::SolverFailure);

  py::class_<LtiSystem>(mod, "LtiSystem")
      .def(py::init([](Matrix a, Matrix b) { return LtiSystem{std::move(a), std::move(b)}; }),
           py::arg("a"), py::arg("b"))
      .def_readwrite("a", &LtiSystem::a)
      .def_readwrite("b", &LtiSystem::b);

  py::class_<TrajectoryData>(mod, "TrajectoryData")
      .def(py::init([](std::vector<Vector> inputs, std::vector<Vector> states) {
             TrajectoryData t{std::move(inputs), std::move(states)};
             t.validate();
             return t;
           }),
           py::arg("inputs"), py::arg("states"))
      .def_readonly("inputs", &TrajectoryData::inputs)
      .def_readonly("states", &TrajectoryData::states)
      .def_property_readonly("n", &TrajectoryData::n)
      .def_property_readonly("m", &TrajectoryData::m)
      .def_property_readonly("horizon", &TrajectoryData::horizon)
      .def("to_json", &io::trajectory_to_json)
      .def("to_csv", &io::trajectory_to_csv);

  py::class_<DataMatrices>(mod, "DataMatrices")
      .def_static("from_matrices", &DataMatrices::from_matrices, py::arg("u_minus"),
                  py::arg("x_minus"), py::arg("x_plus"))
      .def_readonly("u_minus", &DataMatrices::u_minus)
      .def_readonly("x_minus", &DataMatrices::x_minus)
      .def_readonly("x_plus", &DataMatrices::x_plus)
      .def_property_readonly("n", &DataMatrices::n)
      .def_property_readonly("m", &DataMatrices::m)
      .def_property_readonly("horizon", &DataMatrices::horizon);

  py::class_<RowCompression>(mod, "RowCompression")
      .def_readonly("S", &RowCompression::S)
      .def_readonly("rank", &RowCompression::rank)
      .def_readonly("x_hat_minus", &RowCompression::x_hat_minus)
      .def_readonly("x_hat_plus", &RowCompression::x_hat_plus);

  py::class_<ConsistentSet>(mod, "ConsistentSet")
      .def_readonly("particular", &ConsistentSet::particular)
      .def_property_readonly("basis", [](const ConsistentSet& s) { return s.basis.q; });

  py::class_<InformativityReport>(mod, "InformativityReport")
      .def_readonly("n", &InformativityReport::n)
      .def_readonly("m", &InformativityReport::m)
      .def_readonly("horizon", &InformativityReport::horizon)
      .def_readonly("rank_x_minus", &InformativityReport::rank_x_minus)
      .def_readonly("ident", &InformativityReport::ident)
      .def_readonly("plain_stab", &InformativityReport::plain_stab)
      .def_readonly("sigma_cont_stab", &InformativityReport::sigma_cont_stab)
      .def_readonly("sigma_stab", &InformativityReport::sigma_stab)
      .def_readonly("branch", &InformativityReport::branch)
      .def_readonly("condition_a", &InformativityReport::condition_a)
      .def_readonly("condition_b", &InformativityReport::condition_b)
      .def_property_readonly("solver_failure", &InformativityReport::solver_failure)
      .def("to_json", &io::report_to_json);

  py::class_<LmiSolution>(mod, "LmiSolution")
      .def_readonly("theta", &LmiSolution::theta)
      .def_readonly("slack", &LmiSolution::slack)
      .def_readonly("slack_upper_bound", &LmiSolution::slack_upper_bound)
      .def_readonly("status", &LmiSolution::status)
      .def_readonly("newton_steps", &LmiSolution::newton_steps)
      .def_readonly("message", &LmiSolution::message)
      .def_property_readonly("feasible", &LmiSolution::feasible);

  py::class_<FeedbackGain>(mod, "FeedbackGain")
      .def(py::init([](Matrix k, const std::string& provenance) {
             if (provenance != "plain" && provenance != "stab_prior") {
               throw py::value_error("provenance must be 'plain' or 'stab_prior'");
             }
             return FeedbackGain{std::move(k),
                                 provenance == "plain" ? GainProvenance::Plain
                                                       : GainProvenance::StabPrior,
                                 std::nullopt};
           }),
           py::arg("k"), py::arg("provenance") = "stab_prior")
      .def_readonly("k", &FeedbackGain::k)
      .def_property_readonly("provenance",
                             [](const FeedbackGain& g) { return std::string(to_string(g.provenance)); });

  py::class_<StabSynthesis>(mod, "StabSynthesis")
      .def_readonly("gain", &StabSynthesis::gain)
      .def_readonly("k1", &StabSynthesis::k1)
      .def_readonly("solution", &StabSynthesis::solution)
      .def_readonly("compression", &StabSynthesis::compression);

  py::class_<VerificationOptions>(mod, "VerificationOptions")
      .def(py::init<>())
      .def_readwrite("samples_per_scale", &VerificationOptions::samples_per_scale)
      .def_readwrite("scales", &VerificationOptions::scales)
      .def_readwrite("seed", &VerificationOptions::seed)
      .def_readwrite("filter_stabilizable", &VerificationOptions::filter_stabilizable);

  py::class_<VerificationReport>(mod, "VerificationReport")
      .def_readonly("samples_tested", &VerificationReport::samples_tested)
      .def_readonly("rejected_unstabilizable", &VerificationReport::rejected_unstabilizable)
      .def_readonly("max_spectral_radius", &VerificationReport::max_spectral_radius)
      .def_readonly("worst_member", &VerificationReport::worst_member)
      .def_readonly("passed", &VerificationReport::pass)
      .def_property_readonly("accepted", &VerificationReport::accepted);

  py::class_<MonteCarloConfig>(mod, "MonteCarloConfig")
      .def(py::init<>())
      .def_readwrite("scenarios", &MonteCarloConfig::scenarios)
      .def_readwrite("horizon", &MonteCarloConfig::horizon)
      .def_readwrite("t_list", &MonteCarloConfig::t_list)
      .def_readwrite("poisson_lambda", &MonteCarloConfig::poisson_lambda)
      .def_readwrite("seed", &MonteCarloConfig::seed)
      .def_readwrite("system", &MonteCarloConfig::system)
      .def_readwrite("threads", &MonteCarloConfig::threads);

  py::class_<MonteCarloRow>(mod, "MonteCarloRow")
      .def_readonly("horizon", &MonteCarloRow::horizon)
      .def_readonly("ident_pct", &MonteCarloRow::ident_pct)
      .def_readonly("plain_pct", &MonteCarloRow::plain_pct)
      .def_readonly("sigma_stab_pct", &MonteCarloRow::sigma_stab_pct)
      .def_readonly("solver_failures", &MonteCarloRow::solver_failures);

  py::class_<MonteCarloResult>(mod, "MonteCarloResult")
      .def_readonly("seed", &MonteCarloResult::seed)
      .def_readonly("scenarios", &MonteCarloResult::scenarios)
      .def_readonly("rows", &MonteCarloResult::rows);

  mod.def("load_trajectory", &io::load_trajectory, py::arg("path"));
  mod.def("build_data_matrices", &build_data_matrices, py::arg("trajectory"));
  mod.def("simulate", &simulate, py::arg("system"), py::arg("x0"), py::arg("inputs"));
  mod.def("spectral_radius", &spectral_radius, py::arg("m"));
  mod.def("row_compress", &row_compress, py::arg("x_minus"), py::arg("x_plus"),
          py::arg("cfg") = kDefaults);
  mod.def("consistent_set", &consistent_set, py::arg("data"), py::arg("cfg") = kDefaults);
  mod.def("check_identification", &check_identification, py::arg("data"),
          py::arg("cfg") = kDefaults);
  mod.def(
      "check_sigma_stab",
      [](const DataMatrices& d, const NumericalConfig& cfg) { return check_sigma_stab(d, cfg); },
      py::arg("data"), py::arg("cfg") = kDefaults);
  mod.def(
      "solve_plain_lmi",
      [](const DataMatrices& d, const NumericalConfig& cfg) { return solve_plain_lmi(d, cfg); },
      py::arg("data"), py::arg("cfg") = kDefaults);
  mod.def(
      "synthesize_stab",
      [](const DataMatrices& d, const NumericalConfig& cfg, const std::optional<Matrix>& k2) {
        return synthesize_stab(d, cfg, k2_from(k2));
      },
      py::arg("data"), py::arg("cfg") = kDefaults, py::arg("k2") = py::none(),
      "Reduced-LMI synthesis; K2 is zero unless given.");
  mod.def("verify_gain", &verify_gain, py::arg("set"), py::arg("gain"),
          py::arg("options") = VerificationOptions{}, py::arg("cfg") = kDefaults);
  mod.def(
      "run_monte_carlo",
      [](const MonteCarloConfig& c, const NumericalConfig& cfg) {
        py::gil_scoped_release release;
        return run_monte_carlo(c, cfg);
      },
      py::arg("config") = MonteCarloConfig{}, py::arg("cfg") = kDefaults);
  mod.def("report_to_json", &io::report_to_json, py::arg("report"));

  py::module_ ref = mod.def_submodule("reference", "Reference datasets and matrices.");
  ref.def("example1_trajectory", &reference::example1_trajectory);
  ref.def("example2_trajectory", &reference::example2_trajectory);
  ref.def("three_tank_table", &reference::three_tank_table);
  ref.def("three_tank_a", &reference::three_tank_a);
  ref.def("three_tank_b", &reference::three_tank_b);
  ref.def("three_tank_gain", &reference::three_tank_gain);
  ref.def("example1_gain", &reference::example1_gain);
}
