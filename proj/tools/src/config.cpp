#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cli.hpp"

namespace schedopt::cli {

namespace {

std::pair<std::string, std::string> split_once(const std::string& text, char sep) {
  const auto at = text.find(sep);
  if (at == std::string::npos) return {text, std::string{}};
  return {text.substr(0, at), text.substr(at + 1)};
}

double to_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw std::invalid_argument("cannot read " + what + " from '" + text + "'");
  }
  return value;
}

DminAnchor parse_anchor(const std::string& text, const std::string& what) {
  const auto [n, gap] = split_once(text, ':');
  const double nfe = to_double(n, what);
  if (gap.empty() || nfe != std::floor(nfe)) throw std::invalid_argument(what + " must look like NFE:GAP");
  return {static_cast<int>(nfe), to_double(gap, what)};
}

}  // namespace

Interval parse_interval(const std::string& text) {
  const auto [lo, hi] = split_once(text, ':');
  const double a = to_double(lo, "interval");
  const double b = hi.empty() ? a : to_double(hi, "interval");
  if (a > b) throw std::invalid_argument("interval '" + text + "' has lo > hi");
  return {a, b};
}

ResolvedConfig resolve(const RunConfig& c) {
  std::map<std::string, double> params;
  for (const std::string& item : c.model_params) {
    const auto [key, value] = split_once(item, '=');
    if (key.empty() || value.empty()) throw std::invalid_argument("model-param must look like key=value");
    params[key] = to_double(value, "model-param " + key);
  }

  ResolvedConfig r;
  r.mep.model = NoiseScheduleModel::from_parameters(c.model, params);
  if (c.p < 0) throw std::invalid_argument("p must be non-negative");
  r.mep.p = c.p;

  r.spf.gamma = c.gamma;
  r.spf.anchor_low = parse_anchor(c.dmin_low, "dmin-low");
  r.spf.anchor_high = parse_anchor(c.dmin_high, "dmin-high");
  validate(r.spf);

  if (c.local_iterations < 1) throw std::invalid_argument("local-iterations must be at least 1");
  if (!(c.local_tol > 0.0)) throw std::invalid_argument("local-tol must be positive");
  r.local.max_iterations = c.local_iterations;
  r.local.convergence_tol = c.local_tol;
  if (c.endpoints == "fixed") {
    r.local.endpoint_policy = EndpointPolicy::kFixed;
  } else if (c.endpoints == "free") {
    r.local.endpoint_policy = EndpointPolicy::kFree;
  } else {
    throw std::invalid_argument("endpoints must be 'fixed' or 'free'");
  }

  r.search.bounds = {parse_interval(c.bounds_rho), parse_interval(c.bounds_teps), parse_interval(c.bounds_tmax)};
  r.search.population_size = c.population;
  r.search.max_generations = c.generations;
  r.search.de_weight = c.de_weight;
  r.search.de_crossover = c.de_crossover;
  r.search.stall_generations = c.stall_generations;
  r.search.stall_tol = c.stall_tol;
  r.search.seed = c.seed;
  r.search.threads = c.threads;
  validate(r.search);

  if (c.nfe < 1) throw std::invalid_argument("nfe must be at least 1");
  r.nfe = c.nfe;
  return r;
}

}  // namespace schedopt::cli
