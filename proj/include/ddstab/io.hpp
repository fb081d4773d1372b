#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ddstab/datamodel.hpp"
#include "ddstab/experiments.hpp"
#include "ddstab/informativity.hpp"
#include "ddstab/lmisynth.hpp"
#include "ddstab/verification.hpp"

namespace ddstab::io {

/// {"n": .., "m": .., "inputs": [[..], ..], "states": [[..], ..]}
TrajectoryData parse_trajectory_json(std::string_view text);

/// Header t,u_1..u_m,x_1..x_n; one row per t = 0..T, the inputs of the last row empty.
TrajectoryData parse_trajectory_csv(std::string_view text);

/// Dispatches on the extension: .csv is CSV, anything else JSON.
TrajectoryData load_trajectory(const std::filesystem::path& path);

std::string trajectory_to_json(const TrajectoryData& traj);
std::string trajectory_to_csv(const TrajectoryData& traj);

std::string report_to_json(const InformativityReport& report);

/// Gain file: K, provenance and, when present, the synthesis certificate.
std::string synthesis_to_json(const StabSynthesis& synthesis, const InformativityReport& report);
std::string plain_gain_to_json(const FeedbackGain& gain, const LmiSolution& solution,
                               const InformativityReport& report);

/// Reads "K" (rows of numbers) and the optional "provenance" ("plain" or "stab_prior",
/// default "stab_prior").
FeedbackGain parse_gain_json(std::string_view text);

struct VerifySummary {
  VerificationReport verification;
  double structural_nullity = 0.0;
  std::optional<DecompositionDiagnostics> decomposition;
  std::string decomposition_note;
  bool pass = false;
};
std::string verify_to_json(const VerifySummary& summary);

std::string montecarlo_csv(const MonteCarloResult& result);
std::string montecarlo_summary_json(const MonteCarloResult& result);

std::string example1_to_json(const Example1Bundle& bundle);
std::string example2_csv(const Example2Bundle& bundle);
std::string example2_to_json(const Example2Bundle& bundle);
std::string three_tank_to_json(const ThreeTankBundle& bundle);

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories on demand.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace ddstab::io
