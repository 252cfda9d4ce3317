#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "schedopt/errors.hpp"

namespace schedopt::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--model", c.model, "noise schedule kind")->capture_default_str();
  app.add_option("--model-param", c.model_params, "model parameter as key=value (repeatable)");
  app.add_option("--nfe", c.nfe, "number of function evaluations")->capture_default_str();
  app.add_option("--p", c.p, "error proxy exponent")->capture_default_str();
  app.add_option("--gamma", c.gamma, "spacing penalty weight (0 disables)")->capture_default_str();
  app.add_option("--dmin-low", c.dmin_low, "d_min anchor NFE:GAP, large-gap end")->capture_default_str();
  app.add_option("--dmin-high", c.dmin_high, "d_min anchor NFE:GAP, small-gap end")->capture_default_str();
  app.add_option("--local-iterations", c.local_iterations, "refinement iteration cap")->capture_default_str();
  app.add_option("--local-tol", c.local_tol, "refinement convergence tolerance")->capture_default_str();
  app.add_option("--endpoints", c.endpoints, "fixed | free")->capture_default_str();
  app.add_option("--bounds-rho", c.bounds_rho, "rho search interval lo:hi")->capture_default_str();
  app.add_option("--bounds-teps", c.bounds_teps, "t_eps search interval lo:hi")->capture_default_str();
  app.add_option("--bounds-tmax", c.bounds_tmax, "t_max search interval lo:hi")->capture_default_str();
  app.add_option("--population", c.population, "DE population size")->capture_default_str();
  app.add_option("--generations", c.generations, "maximum DE generations")->capture_default_str();
  app.add_option("--de-weight", c.de_weight, "DE differential weight F")->capture_default_str();
  app.add_option("--de-crossover", c.de_crossover, "DE crossover rate CR")->capture_default_str();
  app.add_option("--stall-generations", c.stall_generations, "early-stop window")->capture_default_str();
  app.add_option("--stall-tol", c.stall_tol, "early-stop improvement threshold")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--threads", c.threads, "evaluation threads, 0 = all cores")->capture_default_str();
  app.add_option("--out", c.out, "export path");
  app.add_option("--format", c.format, "json | list")->capture_default_str();
  app.add_option("--families", c.families, "comma-separated schedules for compare")->capture_default_str();
  app.add_option("--lab-seeds", c.lab_seeds, "paired seeds for the analytic lab")->capture_default_str();
  app.add_option("--lab-dim", c.lab_dim, "Gaussian data dimension")->capture_default_str();
  app.add_option("--lab-stdev", c.lab_stdev, "Gaussian data standard deviation")->capture_default_str();
  app.add_option("--lab-mean", c.lab_mean, "Gaussian data mean (every component)")->capture_default_str();
  app.add_option("--lab-rule", c.lab_rule, "hybrid | first-order")->capture_default_str();
}

std::string stem_path(const std::string& out) {
  std::filesystem::path path(out);
  path.replace_extension();
  return path.string() + ".indices.txt";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) throw UsageError("cannot write '" + path + "'");
  file << text;
  if (!file) throw UsageError("failed writing '" + path + "'");
}

std::string index_list(const nlohmann::ordered_json& doc) {
  std::ostringstream s;
  for (const auto& idx : doc["indices"]) s << idx.get<int>() << '\n';
  return s.str();
}

void print_report(std::ostream& out, const FitnessReport& r) {
  out << "j_mep      " << r.j_mep << '\n'
      << "penalty    " << r.penalty << '\n'
      << "gamma      " << r.gamma << '\n'
      << "spf_total  " << r.total << '\n'
      << "min_gap_t  " << r.min_gap_t << '\n'
      << "d_min      " << r.d_min_used << '\n';
}

int cmd_optimize(const RunConfig& c, std::ostream& out) {
  if (c.format != "json" && c.format != "list") throw UsageError("format must be 'json' or 'list'");
  const ResolvedConfig r = resolve(c);
  if (r.nfe < 2) throw UsageError("optimize needs nfe >= 2");
  const OptimizationRun run = optimize(r.mep, r.spf, r.local, r.search, r.nfe);
  const nlohmann::ordered_json doc = make_export(r, run);

  out << std::setprecision(10);
  out << "psi*       rho=" << run.psi_star.rho << " t_eps=" << run.psi_star.t_eps << " t_max=" << run.psi_star.t_max
      << '\n';
  print_report(out, run.report);
  out << "indices   ";
  for (const auto& idx : doc["indices"]) out << ' ' << idx.get<int>();
  out << "\ngenerations " << run.generations << ", evaluations " << run.evaluations << ", wall time "
      << std::setprecision(3) << run.wall_seconds << " s\n";

  if (!c.out.empty()) {
    if (c.format == "json") {
      write_text(c.out, doc.dump(2) + "\n");
      write_text(stem_path(c.out), index_list(doc));
    } else {
      write_text(c.out, index_list(doc));
    }
  }
  return kExitOk;
}

int cmd_evaluate(RunConfig c, const CLI::App& app, const std::string& path, std::ostream& out) {
  // A JSON export carries its own settings; explicit flags still win.
  std::optional<LoadedSchedule> loaded;
  {
    std::ifstream probe(path);
    char first = 0;
    probe >> first;
    if (first == '{') {
      loaded = load_schedule(path, NoiseScheduleModel::ve_identity());
      const nlohmann::json& doc = *loaded->document;
      try {
        if (app.count("--model") == 0 && app.count("--model-param") == 0 && doc.contains("model")) {
          c.model = doc["model"]["kind"].get<std::string>();
          c.model_params.clear();
          for (const auto& [key, value] : doc["model"]["params"].items()) {
            std::ostringstream item;
            item << key << '=' << std::setprecision(17) << value.get<double>();
            c.model_params.push_back(item.str());
          }
        }
        if (app.count("--p") == 0 && doc.contains("p")) c.p = doc["p"].get<int>();
        if (app.count("--gamma") == 0 && doc.contains("gamma")) c.gamma = doc["gamma"].get<double>();
        if (doc.contains("settings") && doc["settings"].contains("spf")) {
          const auto& spf_doc = doc["settings"]["spf"];
          auto anchor = [](const nlohmann::json& a) {
            std::ostringstream s;
            s << a["nfe"].get<int>() << ':' << std::setprecision(17) << a["gap"].get<double>();
            return s.str();
          };
          if (app.count("--dmin-low") == 0) c.dmin_low = anchor(spf_doc["dmin_low"]);
          if (app.count("--dmin-high") == 0) c.dmin_high = anchor(spf_doc["dmin_high"]);
        }
      } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed export settings: ") + e.what());
      }
    }
  }
  const ResolvedConfig r = resolve(c);
  if (!loaded) loaded = load_schedule(path, r.mep.model);
  const int nfe = app.count("--nfe") > 0 ? c.nfe : loaded->nfe;
  const FitnessReport report = spf(r.mep, r.spf, loaded->schedule, nfe);
  out << std::setprecision(17) << "nfe        " << nfe << '\n';
  print_report(out, report);
  return kExitOk;
}

std::vector<std::string> split_families(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = item.find_last_not_of(" \t");
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

int cmd_compare(const RunConfig& c, std::ostream& out) {
  const std::vector<std::string> families = split_families(c.families);
  if (families.empty()) throw UsageError("compare needs at least one schedule family");
  StepRule rule = StepRule::kHybridMidpoint;
  if (c.lab_rule == "first-order") {
    rule = StepRule::kFirstOrder;
  } else if (c.lab_rule != "hybrid") {
    throw UsageError("lab-rule must be 'hybrid' or 'first-order'");
  }
  if (c.lab_dim < 1 || c.lab_seeds < 1) throw UsageError("lab-dim and lab-seeds must be positive");
  for (const std::string& f : families) {
    if (f != "optimized" && f != "uniform-t" && f != "uniform-lambda" && f != "edm") {
      throw UsageError("unknown schedule family '" + f + "'");
    }
  }
  const ResolvedConfig r = resolve(c);
  if (r.nfe < 2) throw UsageError("compare needs nfe >= 2");

  std::optional<OptimizationRun> run;
  if (std::find(families.begin(), families.end(), "optimized") != families.end()) {
    run = optimize(r.mep, r.spf, r.local, r.search, r.nfe);
  }
  // Baselines share the optimised endpoints, or the middle of the search
  // boxes when there is no optimised schedule.
  const double t_max = run ? run->schedule_star.times().front()
                           : 0.5 * (r.search.bounds.t_max.lo + r.search.bounds.t_max.hi);
  const double t_eps = run ? run->schedule_star.times().back()
                           : 0.5 * (r.search.bounds.t_eps.lo + r.search.bounds.t_eps.hi);

  std::vector<NamedSchedule> schedules;
  for (const std::string& f : families) {
    if (f == "optimized") schedules.push_back({f, run->schedule_star});
    if (f == "uniform-t") schedules.push_back({f, uniform_time_schedule(r.mep.model, t_max, t_eps, r.nfe)});
    if (f == "uniform-lambda") schedules.push_back({f, uniform_lambda_schedule(r.mep.model, t_max, t_eps, r.nfe)});
    if (f == "edm") schedules.push_back({f, edm_schedule(r.mep.model, t_max, t_eps, r.nfe)});
  }
  GaussianDataModel data{std::vector<double>(static_cast<std::size_t>(c.lab_dim), c.lab_mean), c.lab_stdev};
  const std::vector<ErrorRow> rows = compare_schedules(data, r.mep.model, schedules, r.nfe, c.lab_seeds, 0, rule);

  out << std::left << std::setw(16) << "schedule" << std::setw(16) << "j_mep" << std::setw(12) << "min_gap_t"
      << std::setw(14) << "lab_mean" << "lab_stdev" << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Schedule& s = schedules[i].schedule;
    out << std::setw(16) << rows[i].name << std::setw(16) << std::setprecision(10) << j_mep(r.mep, s)
        << std::setw(12) << std::setprecision(5) << min_time_gap(s.times()) << std::setw(14)
        << std::setprecision(6) << rows[i].mean_error << rows[i].stdev_error << '\n';
  }
  return kExitOk;
}

int cmd_validate(std::ostream& out) {
  const ScalarFunction f = [](double x) { return std::tanh(0.25 * x); };
  bool ok = true;
  auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    ok = ok && pass;
    out << (pass ? "PASS  " : "FAIL  ") << name << "  " << detail << '\n';
  };

  double previous = 0.0;
  for (double h : {0.5, 0.25, 0.125, 0.0625}) {
    const double res = std::abs(hybrid_midpoint_residual(f, 1.0 - 0.5 * h, 1.0 + 0.5 * h));
    if (previous > 0.0) {
      const double ratio = previous / res;
      std::ostringstream d;
      d << "h=" << h << " ratio=" << std::setprecision(6) << ratio << " (expect 6..10)";
      line("midpoint-order", ratio >= 6.0 && ratio <= 10.0, d.str());
    }
    previous = res;
  }

  const double a = 4.0;
  const double b = 6.0;
  const double c = 100.0;
  const ScalarFunction shifted = [&](double x) { return f(x) + c; };
  const double hybrid_shift = std::abs(hybrid_midpoint_residual(shifted, a, b) - hybrid_midpoint_residual(f, a, b));
  std::ostringstream d1;
  d1 << "|delta|=" << std::setprecision(3) << hybrid_shift << " (limit 1e-11)";
  line("hybrid-shift-invariance", hybrid_shift <= 1e-11, d1.str());

  const double standard_shift = standard_midpoint_residual(shifted, a, b) - standard_midpoint_residual(f, a, b);
  const double expected = c * (std::exp(b) - std::exp(a) - (b - a) * std::exp(0.5 * (a + b)));
  std::ostringstream d2;
  d2 << "delta=" << std::setprecision(10) << standard_shift << " expected=" << expected;
  line("standard-shift-term", std::abs(standard_shift - expected) <= 1e-6 * std::abs(expected) && expected > 0.0,
       d2.str());
  return ok ? kExitOk : kExitUsage;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Timestep schedule optimiser for diffusion samplers", "schedopt"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "flat key = value settings file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  add_options(app, config);

  std::string schedule_path;
  CLI::App* optimize_cmd = app.add_subcommand("optimize", "search for the best schedule and export it");
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "score a schedule file");
  evaluate_cmd->add_option("schedule", schedule_path, "JSON export or newline-separated times/indices")
      ->required();
  CLI::App* compare_cmd = app.add_subcommand("compare", "compare schedules on the objective and the analytic lab");
  CLI::App* validate_cmd = app.add_subcommand("validate", "run the midpoint rule diagnostics");
  for (CLI::App* sub : {optimize_cmd, evaluate_cmd, compare_cmd, validate_cmd}) sub->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*optimize_cmd) return cmd_optimize(config, out);
    if (*evaluate_cmd) return cmd_evaluate(config, app, schedule_path, out);
    if (*compare_cmd) return cmd_compare(config, out);
    return cmd_validate(out);
  } catch (const SearchFailure& e) {
    err << "search failed: " << e.what() << '\n';
    return kExitSearchFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace schedopt::cli
