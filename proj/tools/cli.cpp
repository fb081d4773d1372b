#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ddstab/errors.hpp"
#include "ddstab/experiments.hpp"
#include "ddstab/informativity.hpp"
#include "ddstab/io.hpp"
#include "ddstab/lmisynth.hpp"
#include "ddstab/verification.hpp"

namespace ddstab::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind { Real, Unsigned, String, RealList, IndexList };

struct Key {
  const char* name;
  const char* env;
  Kind kind;
};

constexpr Key kKeys[] = {
    {"rank_rel_tol", "DDSTAB_RANK_REL_TOL", Kind::Real},
    {"subspace_tol", "DDSTAB_SUBSPACE_TOL", Kind::Real},
    {"schur_margin", "DDSTAB_SCHUR_MARGIN", Kind::Real},
    {"psd_margin", "DDSTAB_PSD_MARGIN", Kind::Real},
    {"equality_tol", "DDSTAB_EQUALITY_TOL", Kind::Real},
    {"seed", "DDSTAB_SEED", Kind::Unsigned},
    {"out", "DDSTAB_OUT", Kind::String},
    {"format", "DDSTAB_FORMAT", Kind::String},
    {"samples", "DDSTAB_SAMPLES", Kind::Unsigned},
    {"scales", "DDSTAB_SCALES", Kind::RealList},
    {"backend", "DDSTAB_BACKEND", Kind::String},
    {"scenarios", "DDSTAB_SCENARIOS", Kind::Unsigned},
    {"t_list", "DDSTAB_T_LIST", Kind::IndexList},
    {"threads", "DDSTAB_THREADS", Kind::Unsigned},
};

struct Settings {
  NumericalConfig num;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string format = "json";
  std::size_t samples = 200;
  std::vector<double> scales{0.1, 1.0, 10.0};
  std::string backend = "builtin";
  std::optional<std::size_t> scenarios;
  std::optional<std::vector<Index>> t_list;
  unsigned threads = 1;
};

const Key& find_key(const std::string& name) {
  for (const Key& k : kKeys) {
    if (name == k.name) return k;
  }
  throw UsageError("unknown configuration key '" + name + "'");
}

void apply(Settings& s, const std::string& name, const json& v) {
  const Key& key = find_key(name);
  auto bad = [&](const char* expected) {
    return UsageError("configuration key '" + name + "' expects " + expected);
  };
  double real = 0.0;
  std::uint64_t whole = 0;
  switch (key.kind) {
    case Kind::Real:
      if (!v.is_number()) throw bad("a number");
      real = v.get<double>();
      break;
    case Kind::Unsigned:
      if (!v.is_number_unsigned()) throw bad("a non-negative integer");
      whole = v.get<std::uint64_t>();
      break;
    case Kind::String:
      if (!v.is_string()) throw bad("a string");
      break;
    case Kind::RealList:
    case Kind::IndexList:
      if (!v.is_array() || v.empty()) throw bad("a non-empty list");
      for (const json& e : v) {
        if (key.kind == Kind::RealList ? !e.is_number() : !e.is_number_unsigned()) {
          throw bad(key.kind == Kind::RealList ? "a list of numbers" : "a list of integers");
        }
      }
      break;
  }
  if (name == "rank_rel_tol") s.num.rank_rel_tol = real;
  else if (name == "subspace_tol") s.num.subspace_tol = real;
  else if (name == "schur_margin") s.num.schur_margin = real;
  else if (name == "psd_margin") s.num.psd_margin = real;
  else if (name == "equality_tol") s.num.equality_tol = real;
  else if (name == "seed") s.seed = whole;
  else if (name == "out") s.out = v.get<std::string>();
  else if (name == "format") s.format = v.get<std::string>();
  else if (name == "samples") s.samples = static_cast<std::size_t>(whole);
  else if (name == "scales") s.scales = v.get<std::vector<double>>();
  else if (name == "backend") s.backend = v.get<std::string>();
  else if (name == "scenarios") s.scenarios = static_cast<std::size_t>(whole);
  else if (name == "t_list") s.t_list = v.get<std::vector<Index>>();
  else if (name == "threads") s.threads = static_cast<unsigned>(whole);
}

json parse_scalar(const std::string& text, Kind kind, const std::string& origin) {
  try {
    std::size_t used = 0;
    switch (kind) {
      case Kind::Real: {
        const double d = std::stod(text, &used);
        if (used == text.size()) return d;
        break;
      }
      case Kind::Unsigned: {
        if (!text.empty() && text.front() != '-') {
          const unsigned long long u = std::stoull(text, &used);
          if (used == text.size()) return static_cast<std::uint64_t>(u);
        }
        break;
      }
      default:
        return text;
    }
  } catch (const std::exception&) {
  }
  throw UsageError(origin + ": cannot parse '" + text + "'");
}

json parse_text(const std::string& text, Kind kind, const std::string& origin) {
  if (kind == Kind::String) return text;
  if (kind == Kind::Real || kind == Kind::Unsigned) return parse_scalar(text, kind, origin);
  json list = json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    list.push_back(parse_scalar(item, kind == Kind::RealList ? Kind::Real : Kind::Unsigned, origin));
  }
  return list;
}

void validate(const Settings& s) {
  try {
    s.num.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (s.format != "json" && s.format != "csv") {
    throw UsageError("--format must be json or csv, got '" + s.format + "'");
  }
  if (!find_backend(s.backend)) throw UsageError("unknown backend '" + s.backend + "'");
  if (s.samples == 0) throw UsageError("--samples must be positive");
  for (double sc : s.scales) {
    if (!(sc > 0.0)) throw UsageError("--scales entries must be positive");
  }
  if (s.threads == 0) throw UsageError("--threads must be positive");
}

void flatten(const json& node, const std::string& prefix, std::string& out) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) flatten(node[i], prefix + "." + std::to_string(i), out);
  } else {
    out += prefix + ",";
    if (node.is_string()) {
      out += node.get<std::string>();
    } else if (node.is_number_float()) {
      out += io::format_double(node.get<double>());
    } else {
      out += node.dump();
    }
    out += '\n';
  }
}

/// JSON document re-encoded as key,value rows when the csv format is selected.
std::string encode(const std::string& json_text, const Settings& s) {
  if (s.format == "json") return json_text;
  std::string out = "key,value\n";
  flatten(json::parse(json_text, nullptr, true, false), "", out);
  return out;
}

std::string ext(const Settings& s) { return s.format == "json" ? ".json" : ".csv"; }

struct Emitter {
  const Settings& settings;
  std::ostream& out;
  bool stdout_used = false;

  /// Writes to <out>/<name> when an output directory is set, else prints `content` once.
  void emit(const std::string& name, const std::string& content, bool primary = true) {
    if (settings.out) {
      io::write_file(fs::path(*settings.out) / name, content);
    } else if (primary && !stdout_used) {
      out << content;
      stdout_used = true;
    }
  }
};

int verdict_code(const InformativityReport& rep) {
  if (rep.sigma_stab) return kSuccess;
  if (rep.branch == Branch::FullRank && rep.solver_failure()) return kFailure;
  return kNegative;
}

int cmd_informativity(const Settings& s, const std::string& data_file, std::ostream& out,
                      std::ostream& err) {
  const DataMatrices data = build_data_matrices(io::load_trajectory(data_file));
  const InformativityReport rep = check_sigma_stab(data, s.num, *find_backend(s.backend));
  Emitter{s, out}.emit("informativity" + ext(s), encode(io::report_to_json(rep), s));
  const int code = verdict_code(rep);
  if (code == kFailure) err << "ddstab: solver failure: " << rep.diagnostics.plain_message << "\n";
  return code;
}

int cmd_synthesize(const Settings& s, const std::string& data_file, bool dump_lmi,
                   std::ostream& out, std::ostream& err) {
  const DataMatrices data = build_data_matrices(io::load_trajectory(data_file));
  const SdpBackend& backend = *find_backend(s.backend);
  const InformativityReport rep = check_sigma_stab(data, s.num, backend);
  Emitter em{s, out};
  const int code = verdict_code(rep);
  if (code != kSuccess) {
    em.emit("informativity" + ext(s), encode(io::report_to_json(rep), s));
    err << "ddstab: " << (code == kFailure ? "solver failure" : "not informative") << "\n";
    return code;
  }
  if (rep.branch == Branch::FullRank) {
    const LmiSolution sol = solve_plain_lmi(data, s.num, backend);
    if (!sol.feasible()) {
      err << "ddstab: solver failure: " << sol.message << "\n";
      return kFailure;
    }
    const FeedbackGain gain = gain_from_plain(data, sol);
    em.emit("gain" + ext(s), encode(io::plain_gain_to_json(gain, sol, rep), s));
    if (dump_lmi) em.emit("lmi_problem.json", dump_problem_json(plain_problem(data)), false);
  } else {
    const StabSynthesis syn = synthesize_stab(data, s.num, K2Policy::zero(), backend);
    em.emit("gain" + ext(s), encode(io::synthesis_to_json(syn, rep), s));
    if (dump_lmi) em.emit("lmi_problem.json", dump_problem_json(stab_problem(data, syn.compression)), false);
  }
  return kSuccess;
}

constexpr double kStructuralTol = 1e-6;

int cmd_verify(const Settings& s, const std::string& data_file, const std::string& gain_file,
               std::ostream& out) {
  const DataMatrices data = build_data_matrices(io::load_trajectory(data_file));
  FeedbackGain gain;
  try {
    gain = io::parse_gain_json(io::read_file(gain_file));
  } catch (const ParseError& e) {
    throw ParseError(gain_file + ": " + e.what());
  }
  if (gain.k.rows() != data.m() || gain.k.cols() != data.n()) {
    throw DimensionMismatch("gain is " + std::to_string(gain.k.rows()) + "x" +
                            std::to_string(gain.k.cols()) + " but the data need " +
                            std::to_string(data.m()) + "x" + std::to_string(data.n()));
  }
  const ConsistentSet set = consistent_set(data, s.num);
  VerificationOptions opts;
  opts.samples_per_scale = s.samples;
  opts.scales = s.scales;
  opts.seed = s.seed.value_or(0);

  io::VerifySummary sum;
  sum.verification = verify_gain(set, gain, opts, s.num);
  sum.structural_nullity = sum.verification.max_structural_residual();
  if (is_stabilizable(set.particular.a, set.particular.b, s.num)) {
    try {
      sum.decomposition =
          decomposition_check(data, row_compress(data.x_minus, data.x_plus, s.num), set.particular, s.num);
    } catch (const PreconditionViolated& e) {
      sum.decomposition_note = e.what();
    }
  } else {
    sum.decomposition_note = "particular solution is not stabilizable";
  }
  sum.pass = sum.verification.pass && sum.structural_nullity <= kStructuralTol &&
             (!sum.decomposition || sum.decomposition->pass);
  Emitter{s, out}.emit("verification" + ext(s), encode(io::verify_to_json(sum), s));
  return sum.pass ? kSuccess : kNegative;
}

int cmd_montecarlo(const Settings& s, std::ostream& out, std::ostream& err) {
  MonteCarloConfig mc;
  if (s.scenarios) mc.scenarios = *s.scenarios;
  if (s.t_list) mc.t_list = *s.t_list;
  if (s.seed) mc.seed = *s.seed;
  mc.threads = s.threads;
  try {
    mc.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const MonteCarloResult res = run_monte_carlo(mc, s.num, *find_backend(s.backend));
  Emitter em{s, out};
  std::string summary = io::montecarlo_summary_json(res);
  if (s.format == "csv") {
    summary = "T,ident_pct,plain_pct,sigma_stab_pct,solver_failures\n";
    for (const MonteCarloRow& r : res.rows) {
      summary += std::to_string(r.horizon) + ',' + io::format_double(r.ident_pct) + ',' +
                 io::format_double(r.plain_pct) + ',' + io::format_double(r.sigma_stab_pct) + ',' +
                 std::to_string(r.solver_failures) + '\n';
    }
  }
  em.emit("montecarlo_summary" + ext(s), summary);
  em.emit("montecarlo_verdicts.csv", io::montecarlo_csv(res), false);
  std::size_t failures = 0;
  for (const MonteCarloRow& r : res.rows) failures += r.solver_failures;
  if (failures > 0) err << "ddstab: " << failures << " solver failures (see summary)\n";
  return kSuccess;
}

int cmd_demo(const Settings& s, const std::string& name, std::ostream& out) {
  const SdpBackend& backend = *find_backend(s.backend);
  VerificationOptions opts;
  opts.samples_per_scale = s.samples;
  opts.scales = s.scales;
  opts.seed = s.seed.value_or(0);
  Emitter em{s, out};
  if (name == "example1") {
    em.emit("example1" + ext(s), encode(io::example1_to_json(demo_example1(s.num, opts, backend)), s));
  } else if (name == "example2") {
    const Example2Bundle b = demo_example2(s.num, 2.0, 0.25, backend);
    em.emit("example2" + ext(s), encode(io::example2_to_json(b), s));
    em.emit("example2_plane.csv", io::example2_csv(b), false);
  } else if (name == "three-tank") {
    em.emit("three_tank" + ext(s), encode(io::three_tank_to_json(demo_three_tank(s.num, opts, backend)), s));
  } else {
    throw UsageError("unknown demo '" + name + "' (expected example1, example2 or three-tank)");
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-driven stabilization toolkit", "ddstab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> flag_seed;
  std::optional<std::string> flag_out, flag_format, flag_backend, flag_scales, flag_t_list;
  std::optional<std::size_t> flag_samples, flag_scenarios;
  std::optional<unsigned> flag_threads;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", flag_seed, "Random seed");
  app.add_option("--out", flag_out, "Output directory (created on demand)");
  app.add_option("--format", flag_format, "Report format: json or csv");
  app.add_option("--samples", flag_samples, "Verification draws per scale");
  app.add_option("--scales", flag_scales, "Comma-separated verification scales");
  app.add_option("--backend", flag_backend, "SDP backend name");

  std::string data_file, gain_file, demo_name;
  bool dump_lmi = false;
  auto* informativity = app.add_subcommand("informativity", "Check informativity of a dataset");
  informativity->add_option("data", data_file, "Trajectory file (.json or .csv)")->required();
  auto* synthesize = app.add_subcommand("synthesize", "Synthesize a stabilizing gain");
  synthesize->add_option("data", data_file, "Trajectory file (.json or .csv)")->required();
  synthesize->add_flag("--dump-lmi", dump_lmi, "Also write the LMI problem (needs --out)");
  auto* verify = app.add_subcommand("verify", "Verify a gain against the consistent set");
  verify->add_option("data", data_file, "Trajectory file (.json or .csv)")->required();
  verify->add_option("gain", gain_file, "Gain file (JSON with field K)")->required();
  auto* montecarlo = app.add_subcommand("montecarlo", "Randomized informativity study");
  montecarlo->add_option("--scenarios", flag_scenarios, "Number of scenarios");
  montecarlo->add_option("--t-list", flag_t_list, "Comma-separated horizons T");
  montecarlo->add_option("--threads", flag_threads, "Worker threads");
  auto* demo = app.add_subcommand("demo", "Run a bundled scenario");
  demo->add_option("name", demo_name, "example1, example2 or three-tank")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "ddstab: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kUsage;
  }

  Settings settings;
  try {
    if (!config_path) {
      if (const char* env = std::getenv("DDSTAB_CONFIG")) config_path = env;
    }
    if (config_path) {
      std::string text;
      try {
        text = io::read_file(*config_path);
      } catch (const std::exception& e) {
        err << "ddstab: " << e.what() << "\n";
        return kFailure;
      }
      json doc;
      try {
        doc = json::parse(text);
      } catch (const json::parse_error& e) {
        throw UsageError(*config_path + ": " + e.what());
      }
      if (!doc.is_object()) throw UsageError(*config_path + ": top level must be an object");
      for (const auto& [k, v] : doc.items()) apply(settings, k, v);
    }
    for (const Key& key : kKeys) {
      if (const char* env = std::getenv(key.env)) {
        apply(settings, key.name, parse_text(env, key.kind, key.env));
      }
    }
    if (flag_seed) settings.seed = *flag_seed;
    if (flag_out) settings.out = *flag_out;
    if (flag_format) settings.format = *flag_format;
    if (flag_samples) settings.samples = *flag_samples;
    if (flag_scales) apply(settings, "scales", parse_text(*flag_scales, Kind::RealList, "--scales"));
    if (flag_backend) settings.backend = *flag_backend;
    if (flag_scenarios) settings.scenarios = *flag_scenarios;
    if (flag_t_list) apply(settings, "t_list", parse_text(*flag_t_list, Kind::IndexList, "--t-list"));
    if (flag_threads) settings.threads = *flag_threads;
    validate(settings);

    if (*informativity) return cmd_informativity(settings, data_file, out, err);
    if (*synthesize) return cmd_synthesize(settings, data_file, dump_lmi, out, err);
    if (*verify) return cmd_verify(settings, data_file, gain_file, out);
    if (*montecarlo) return cmd_montecarlo(settings, out, err);
    if (*demo) return cmd_demo(settings, demo_name, out);
  } catch (const UsageError& e) {
    err << "ddstab: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "ddstab: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace ddstab::cli
