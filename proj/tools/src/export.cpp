#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cli.hpp"

namespace schedopt::cli {

using nlohmann::ordered_json;

int time_to_index(double t) {
  const long idx = std::lround(t * 1000.0) - 1;
  return static_cast<int>(std::clamp(idx, 0L, 999L));
}

namespace {

ordered_json interval_json(const Interval& iv) { return ordered_json::array({iv.lo, iv.hi}); }

ordered_json anchor_json(const DminAnchor& a) { return {{"nfe", a.nfe}, {"gap", a.gap}}; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> number_array(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw std::runtime_error(std::string("export is missing the '") + key + "' array");
  }
  std::vector<double> out;
  for (const auto& v : doc[key]) {
    if (!v.is_number()) throw std::runtime_error(std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ordered_json make_export(const ResolvedConfig& r, const OptimizationRun& run) {
  const Schedule& sched = run.schedule_star;
  const std::span<const double> times = sched.times();
  std::vector<int> indices;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) indices.push_back(time_to_index(times[i]));

  ordered_json params = ordered_json::object();
  for (const auto& [key, value] : r.mep.model.parameters()) params[key] = value;

  ordered_json doc;
  doc["tool"] = "schedopt";
  doc["version"] = kToolVersion;
  doc["nfe"] = run.nfe;
  doc["psi_star"] = {{"rho", run.psi_star.rho}, {"t_eps", run.psi_star.t_eps}, {"t_max", run.psi_star.t_max}};
  doc["lambdas"] = std::vector<double>(sched.lambdas().begin(), sched.lambdas().end());
  doc["times"] = std::vector<double>(times.begin(), times.end());
  doc["indices"] = indices;
  doc["terminal_time"] = times.back();
  doc["index_convention"] = "index = clamp(round(1000 t) - 1, 0, 999)";
  doc["j_mep"] = run.report.j_mep;
  doc["penalty"] = run.report.penalty;
  doc["spf_total"] = run.report.total;
  doc["min_gap_t"] = run.report.min_gap_t;
  doc["d_min_used"] = run.report.d_min_used;
  doc["gamma"] = r.spf.gamma;
  doc["p"] = r.mep.p;
  doc["penalty_disabled"] = r.spf.gamma == 0.0;
  doc["seed"] = r.search.seed;
  doc["model"] = {{"kind", std::string(to_string(r.mep.model.kind()))}, {"params", params}};
  doc["settings"] = {
      {"spf", {{"gamma", r.spf.gamma}, {"dmin_low", anchor_json(r.spf.anchor_low)},
               {"dmin_high", anchor_json(r.spf.anchor_high)}}},
      {"local", {{"max_iterations", r.local.max_iterations}, {"convergence_tol", r.local.convergence_tol},
                 {"min_lambda_gap", r.local.min_lambda_gap},
                 {"endpoints", r.local.endpoint_policy == EndpointPolicy::kFixed ? "fixed" : "free"}}},
      {"search", {{"bounds_rho", interval_json(r.search.bounds.rho)},
                  {"bounds_teps", interval_json(r.search.bounds.t_eps)},
                  {"bounds_tmax", interval_json(r.search.bounds.t_max)},
                  {"population", r.search.population_size},
                  {"generations", r.search.max_generations},
                  {"de_weight", r.search.de_weight},
                  {"de_crossover", r.search.de_crossover},
                  {"stall_generations", r.search.stall_generations},
                  {"stall_tol", r.search.stall_tol},
                  {"seed", r.search.seed}}},
  };
  doc["best_trace"] = run.best_trace;
  doc["generations"] = run.generations;
  doc["evaluations"] = run.evaluations;
  return doc;
}

LoadedSchedule load_schedule(const std::string& path, const NoiseScheduleModel& model) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw std::runtime_error("schedule file '" + path + "' is empty");

  if (text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("malformed JSON in '" + path + "': " + e.what());
    }
    std::vector<double> lambdas = number_array(doc, "lambdas");
    std::vector<double> times = number_array(doc, "times");
    if (lambdas.size() != times.size() || lambdas.size() < 2) {
      throw std::runtime_error("export lambdas and times must have the same length of at least 2");
    }
    int nfe = static_cast<int>(lambdas.size()) - 1;
    if (doc.contains("nfe")) {
      if (!doc["nfe"].is_number_integer()) throw std::runtime_error("export 'nfe' must be an integer");
      nfe = doc["nfe"].get<int>();
    }
    Schedule sched = Schedule::from_pairs(std::move(lambdas), std::move(times), GapCheck::kNonDecreasing);
    return {std::move(sched), nfe, std::move(doc)};
  }

  std::istringstream in(text);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  std::vector<double> values;
  bool all_indices = true;
  for (const std::string& tok : tokens) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v)) throw std::runtime_error("bad entry '" + tok + "' in " + path);
    const bool integral = tok.find_first_not_of("0123456789") == std::string::npos;
    all_indices = all_indices && integral && v >= 1.0;
    values.push_back(v);
  }
  if (values.size() < 2) throw std::runtime_error("a schedule list needs at least two entries");
  if (all_indices) {
    for (double& v : values) {
      if (v > 999.0) throw std::runtime_error("grid index above 999 in " + path);
      v = (v + 1.0) / 1000.0;
    }
  }
  const int nfe = static_cast<int>(values.size());
  Schedule sched = Schedule::from_times(model, std::move(values), GapCheck::kNonDecreasing);
  return {std::move(sched), nfe, std::nullopt};
}

}  // namespace schedopt::cli
