#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "schedopt/analytic_lab.hpp"
#include "schedopt/global_search.hpp"
#include "schedopt/local_opt.hpp"
#include "schedopt/mep.hpp"
#include "schedopt/spf.hpp"

namespace schedopt::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSearchFailure = 2;

/// Everything a run needs, as read from flags and the config file.
struct RunConfig {
  std::string model = "vp-scaled-linear";
  std::vector<std::string> model_params;  // "key=value"
  int nfe = 4;
  int p = kDefaultProxyExponent;
  double gamma = 100.0;
  std::string dmin_low = "4:0.15";
  std::string dmin_high = "20:0.01";
  int local_iterations = 200;
  double local_tol = 1e-9;
  std::string endpoints = "fixed";
  std::string bounds_rho = "3:16";
  std::string bounds_teps = "0.01:0.03";
  std::string bounds_tmax = "0.96:1";
  int population = 24;
  int generations = 40;
  double de_weight = 0.7;
  double de_crossover = 0.9;
  int stall_generations = 10;
  double stall_tol = 1e-8;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  std::string format = "json";
  // compare
  std::string families = "optimized,uniform-t,uniform-lambda,edm";
  int lab_seeds = 64;
  int lab_dim = 2;
  double lab_stdev = 1.0;
  double lab_mean = 0.0;
  std::string lab_rule = "hybrid";
};

/// Library settings derived from a RunConfig; building it validates every
/// component and throws std::invalid_argument on the first problem.
struct ResolvedConfig {
  MepConfig mep;
  SpfSettings spf;
  LocalOptSettings local;
  SearchSettings search;
  int nfe = 4;
};

ResolvedConfig resolve(const RunConfig& config);

/// "lo:hi" or a single value for a point interval.
Interval parse_interval(const std::string& text);

/// Grid index of a continuous time: clamp(round(1000 t) - 1, 0, 999).
int time_to_index(double t);

/// The exported document for an optimize run.
nlohmann::ordered_json make_export(const ResolvedConfig& resolved, const OptimizationRun& run);

/// A schedule read back from disk along with what the file said about itself.
struct LoadedSchedule {
  Schedule schedule;
  int nfe = 0;
  /// Present for JSON exports.
  std::optional<nlohmann::json> document;
};

/// Reads a JSON export or a newline-separated list of times or grid indices.
/// Throws std::runtime_error on malformed input.
LoadedSchedule load_schedule(const std::string& path, const NoiseScheduleModel& model);

/// Entry point shared by the executable and the tests. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace schedopt::cli
