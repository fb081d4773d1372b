#include "ddstab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "ddstab/errors.hpp"

namespace ddstab::io {

using json = nlohmann::ordered_json;

namespace {

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back({{"re", v(i).real()}, {"im", v(i).imag()}});
  return out;
}

json to_json(const LtiSystem& sys) { return {{"A", to_json(sys.a)}, {"B", to_json(sys.b)}}; }

json to_json(const TrajectoryData& traj) {
  json inputs = json::array();
  for (const Vector& u : traj.inputs) inputs.push_back(to_json(u));
  json states = json::array();
  for (const Vector& x : traj.states) states.push_back(to_json(x));
  return {{"n", traj.n()}, {"m", traj.m()}, {"inputs", inputs}, {"states", states}};
}

json to_json(const InformativityReport& r) {
  const auto& d = r.diagnostics;
  json out;
  out["n"] = r.n;
  out["m"] = r.m;
  out["horizon"] = r.horizon;
  out["rank_x_minus"] = r.rank_x_minus;
  out["branch"] = to_string(r.branch);
  out["ident"] = r.ident;
  out["plain"] = r.plain_stab;
  out["sigma_cont"] = r.sigma_cont_stab;
  out["sigma_stab"] = r.sigma_stab;
  out["condition_a"] = r.condition_a;
  out["condition_b"] = r.condition_b;
  out["plain_theta"] = r.plain_theta ? to_json(*r.plain_theta) : json(nullptr);
  out["diagnostics"] = {{"x_minus_singular_values", to_json(d.x_minus_singular_values)},
                        {"rank_threshold", d.rank_threshold},
                        {"marginal_rank", d.marginal_rank},
                        {"rank_stacked", d.rank_stacked},
                        {"null_dim", d.null_dim},
                        {"condition_a_residual", d.condition_a_residual},
                        {"plain_status", to_string(d.plain_status)},
                        {"plain_slack", d.plain_slack},
                        {"plain_message", d.plain_message}};
  return out;
}

json to_json(const LmiSolution& s) {
  return {{"status", to_string(s.status)},
          {"slack", s.slack},
          {"slack_upper_bound", s.slack_upper_bound},
          {"newton_steps", s.newton_steps},
          {"message", s.message},
          {"theta", to_json(s.theta)}};
}

json to_json(const VerificationReport& v) {
  json out;
  out["pass"] = v.pass;
  out["samples_tested"] = v.samples_tested;
  out["rejected_unstabilizable"] = v.rejected_unstabilizable;
  out["accepted"] = v.accepted();
  out["max_spectral_radius"] = v.max_spectral_radius;
  out["max_structural_residual"] = v.max_structural_residual();
  out["seed"] = v.seed;
  out["scales"] = v.scales;
  out["samples_per_scale"] = v.samples_per_scale;
  out["filtered_stabilizable"] = v.filtered;
  out["worst_member"] = v.worst_member ? to_json(*v.worst_member) : json(nullptr);
  return out;
}

json to_json(const DecompositionDiagnostics& d) {
  return {{"pass", d.pass},
          {"a21_norm", d.a21_norm},
          {"b2_norm", d.b2_norm},
          {"a22_schur", d.a22_schur},
          {"pair11_stabilizable", d.pair11_stabilizable},
          {"reachable_mismatch", d.reachable_mismatch ? json(*d.reachable_mismatch) : json(nullptr)},
          {"A11", to_json(d.a11)},
          {"B1", to_json(d.b1)}};
}

json to_json(const StabSynthesis& s) {
  json out;
  out["K"] = to_json(s.gain.k);
  out["provenance"] = to_string(s.gain.provenance);
  out["K1"] = to_json(s.k1);
  out["k2_policy"] = s.gain.k2_policy ? json(s.gain.k2_policy->kind == K2Policy::Kind::Zero ? "zero" : "fixed")
                                      : json(nullptr);
  out["lmi"] = to_json(s.solution);
  out["compression"] = {{"rank", s.compression.rank},
                        {"S", to_json(s.compression.S)},
                        {"x_hat_minus", to_json(s.compression.x_hat_minus)},
                        {"x_hat_plus", to_json(s.compression.x_hat_plus)}};
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Vector parse_vector(const json& node, Index expected, const std::string& where) {
  if (expected == 1 && node.is_number()) return Vector::Constant(1, node.get<double>());
  if (!node.is_array()) throw ParseError(where + ": expected an array of numbers");
  if (static_cast<Index>(node.size()) != expected) {
    throw ParseError(where + ": expected " + std::to_string(expected) + " entries, got " +
                     std::to_string(node.size()));
  }
  Vector v(expected);
  for (Index i = 0; i < expected; ++i) {
    const json& e = node[static_cast<std::size_t>(i)];
    if (!e.is_number()) {
      throw ParseError(where + "[" + std::to_string(i) + "]: not a number");
    }
    v(i) = e.get<double>();
  }
  return v;
}

Index dimension_of(const json& list, const std::string& name) {
  const json& first = list.front();
  if (first.is_number()) return 1;
  if (!first.is_array() || first.empty()) {
    throw ParseError(name + "[0]: expected a non-empty array of numbers");
  }
  return static_cast<Index>(first.size());
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& field, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("row " + std::to_string(row) + ", field '" + column + "': '" + field +
                     "' is not a number");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

TrajectoryData parse_trajectory_json(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("trajectory: top level must be an object");
  for (const char* key : {"inputs", "states"}) {
    if (!doc.contains(key) || !doc[key].is_array() || doc[key].empty()) {
      throw ParseError(std::string("trajectory: field '") + key + "' must be a non-empty array");
    }
  }
  const json& inputs = doc["inputs"];
  const json& states = doc["states"];
  const Index n = dimension_of(states, "states");
  const Index m = dimension_of(inputs, "inputs");
  auto check_dim = [&](const char* key, Index actual) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer() || doc[key].get<long long>() != actual) {
      throw ParseError(std::string("trajectory: field '") + key + "' does not match the data (" +
                       std::to_string(actual) + ")");
    }
  };
  check_dim("n", n);
  check_dim("m", m);

  TrajectoryData traj;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    traj.inputs.push_back(parse_vector(inputs[t], m, "inputs[" + std::to_string(t) + "]"));
  }
  for (std::size_t t = 0; t < states.size(); ++t) {
    traj.states.push_back(parse_vector(states[t], n, "states[" + std::to_string(t) + "]"));
  }
  try {
    traj.validate();
  } catch (const std::exception& e) {
    throw ParseError(std::string("trajectory: ") + e.what());
  }
  return traj;
}

TrajectoryData parse_trajectory_csv(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      std::string line(text.substr(start, nl - start));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
      start = nl + 1;
    }
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("CSV: empty file");

  const std::vector<std::string> header = split_fields(lines.front());
  if (header.empty() || header.front() != "t") {
    throw ParseError("CSV header: first column must be 't'");
  }
  Index m = 0;
  Index n = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (n == 0 && name == "u_" + std::to_string(m + 1)) {
      ++m;
    } else if (name == "x_" + std::to_string(n + 1)) {
      ++n;
    } else {
      throw ParseError("CSV header: unexpected column '" + name + "' at position " +
                       std::to_string(c + 1));
    }
  }
  if (m == 0 || n == 0) throw ParseError("CSV header: need at least one u_ and one x_ column");
  if (lines.size() < 3) throw ParseError("CSV: need at least two data rows (t = 0 and t = 1)");

  TrajectoryData traj;
  const std::size_t last = lines.size() - 1;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> fields = split_fields(lines[r]);
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(r) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    const double t = parse_number(fields[0], r, "t");
    if (t != static_cast<double>(r - 1)) {
      throw ParseError("row " + std::to_string(r) + ", field 't': expected " +
                       std::to_string(r - 1) + ", got '" + fields[0] + "'");
    }
    if (r < last) {
      Vector u(m);
      for (Index j = 0; j < m; ++j) {
        u(j) = parse_number(fields[static_cast<std::size_t>(1 + j)], r, header[static_cast<std::size_t>(1 + j)]);
      }
      traj.inputs.push_back(std::move(u));
    } else {
      for (Index j = 0; j < m; ++j) {
        if (!fields[static_cast<std::size_t>(1 + j)].empty()) {
          throw ParseError("row " + std::to_string(r) + ", field '" +
                           header[static_cast<std::size_t>(1 + j)] +
                           "': the final row carries no input and must be empty");
        }
      }
    }
    Vector x(n);
    for (Index i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(1 + m + i);
      x(i) = parse_number(fields[c], r, header[c]);
    }
    traj.states.push_back(std::move(x));
  }
  try {
    traj.validate();
  } catch (const std::exception& e) {
    throw ParseError(std::string("trajectory: ") + e.what());
  }
  return traj;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

TrajectoryData load_trajectory(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return path.extension() == ".csv" ? parse_trajectory_csv(text) : parse_trajectory_json(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string trajectory_to_json(const TrajectoryData& traj) { return dump(to_json(traj)); }

std::string trajectory_to_csv(const TrajectoryData& traj) {
  std::string out = "t";
  for (Index j = 0; j < traj.m(); ++j) out += ",u_" + std::to_string(j + 1);
  for (Index i = 0; i < traj.n(); ++i) out += ",x_" + std::to_string(i + 1);
  out += '\n';
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    out += std::to_string(t);
    for (Index j = 0; j < traj.m(); ++j) {
      out += ',';
      if (t < traj.inputs.size()) out += format_double(traj.inputs[t](j));
    }
    for (Index i = 0; i < traj.n(); ++i) out += ',' + format_double(traj.states[t](i));
    out += '\n';
  }
  return out;
}

std::string report_to_json(const InformativityReport& report) { return dump(to_json(report)); }

std::string synthesis_to_json(const StabSynthesis& synthesis, const InformativityReport& report) {
  json out = to_json(synthesis);
  out["branch"] = to_string(report.branch);
  out["report"] = to_json(report);
  return dump(out);
}

std::string plain_gain_to_json(const FeedbackGain& gain, const LmiSolution& solution,
                               const InformativityReport& report) {
  json out;
  out["K"] = to_json(gain.k);
  out["provenance"] = to_string(gain.provenance);
  out["lmi"] = to_json(solution);
  out["branch"] = to_string(report.branch);
  out["report"] = to_json(report);
  return dump(out);
}

FeedbackGain parse_gain_json(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("K") || !doc["K"].is_array() || doc["K"].empty()) {
    throw ParseError("gain: field 'K' must be a non-empty array of rows");
  }
  const json& rows = doc["K"];
  const Index m = static_cast<Index>(rows.size());
  const Index n = dimension_of(rows, "K");
  FeedbackGain gain;
  gain.k.resize(m, n);
  for (Index i = 0; i < m; ++i) {
    gain.k.row(i) = parse_vector(rows[static_cast<std::size_t>(i)], n, "K[" + std::to_string(i) + "]");
  }
  gain.provenance = GainProvenance::StabPrior;
  if (doc.contains("provenance")) {
    const json& p = doc["provenance"];
    if (p == "plain") {
      gain.provenance = GainProvenance::Plain;
    } else if (p != "stab_prior") {
      throw ParseError("gain: field 'provenance' must be \"plain\" or \"stab_prior\"");
    }
  }
  return gain;
}

std::string verify_to_json(const VerifySummary& s) {
  json out;
  out["pass"] = s.pass;
  out["verification"] = to_json(s.verification);
  out["structural_nullity"] = s.structural_nullity;
  out["decomposition"] = s.decomposition ? to_json(*s.decomposition) : json(nullptr);
  if (!s.decomposition_note.empty()) out["decomposition_note"] = s.decomposition_note;
  return dump(out);
}

std::string montecarlo_csv(const MonteCarloResult& result) {
  std::string out = "scenario,T,ident,plain,sigma_stab,solver_failure,branch\n";
  for (const ScenarioVerdict& v : result.verdicts) {
    out += std::to_string(v.scenario) + ',' + std::to_string(v.horizon) + ',' +
           (v.ident ? "1" : "0") + ',' + (v.plain ? "1" : "0") + ',' +
           (v.sigma_stab ? "1" : "0") + ',' + (v.solver_failure ? "1" : "0") + ',' +
           to_string(v.branch) + '\n';
  }
  return out;
}

std::string montecarlo_summary_json(const MonteCarloResult& result) {
  json rows = json::array();
  std::size_t failures = 0;
  for (const MonteCarloRow& r : result.rows) {
    rows.push_back({{"T", r.horizon},
                    {"ident_pct", r.ident_pct},
                    {"plain_pct", r.plain_pct},
                    {"sigma_stab_pct", r.sigma_stab_pct},
                    {"solver_failures", r.solver_failures}});
    failures += r.solver_failures;
  }
  json out;
  out["seed"] = result.seed;
  out["scenarios"] = result.scenarios;
  out["solver_failures"] = failures;
  out["rows"] = rows;
  return dump(out);
}

std::string example1_to_json(const Example1Bundle& b) {
  json out;
  out["trajectory"] = to_json(b.trajectory);
  out["report"] = to_json(b.report);
  out["synthesis"] = to_json(b.synthesis);
  out["verification"] = to_json(b.verification);
  out["reference_gain"] = to_json(reference::example1_gain());
  out["reference_gain_verification"] = to_json(b.reference_gain_verification);
  return dump(out);
}

std::string example2_csv(const Example2Bundle& b) {
  std::string out = "a,b1,b2,controllable\n";
  for (const PlanePoint& p : b.grid) {
    out += format_double(p.a) + ',' + format_double(p.b1) + ',' + format_double(p.b2) + ',' +
           (p.controllable ? "1" : "0") + '\n';
  }
  return out;
}

std::string example2_to_json(const Example2Bundle& b) {
  json uncontrollable = json::array();
  for (const PlanePoint& p : b.grid) {
    if (!p.controllable) uncontrollable.push_back({{"a", p.a}, {"b1", p.b1}, {"b2", p.b2}});
  }
  json out;
  out["trajectory"] = to_json(b.trajectory);
  out["report"] = to_json(b.report);
  out["grid_points"] = b.grid.size();
  out["uncontrollable"] = uncontrollable;
  return dump(out);
}

std::string three_tank_to_json(const ThreeTankBundle& b) {
  json out;
  out["A_c"] = to_json(b.continuous.a_c);
  out["B_c"] = to_json(b.continuous.b_c);
  out["sample_time"] = b.continuous.sample_time;
  out["discrete"] = to_json(b.discrete);
  out["table"] = to_json(b.table);
  out["simulated"] = to_json(b.simulated);
  out["report"] = to_json(b.report);
  out["synthesis"] = to_json(b.synthesis);
  out["closed_loop_spectrum"] = to_json(b.closed_loop_spectrum);
  out["closed_loop_rho"] = b.closed_loop_rho;
  out["reference_gain"] = to_json(reference::three_tank_gain());
  out["reference_gain_rho"] = b.reference_gain_rho;
  out["verification"] = to_json(b.verification);
  return dump(out);
}

}  // namespace ddstab::io
