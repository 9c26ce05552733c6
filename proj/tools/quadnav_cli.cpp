#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "quadnav/artifacts.hpp"
#include "quadnav/error.hpp"
#include "quadnav/nav.hpp"
#include "quadnav/scenario.hpp"

namespace {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("QUADNAV_LOG_LEVEL");
  if (!env) return Level::Info;
  const std::string v = env;
  if (v == "error") return Level::Error;
  if (v == "warn") return Level::Warn;
  if (v == "debug") return Level::Debug;
  return Level::Info;
}

void log(Level lvl, const std::string& msg) {
  if (static_cast<int>(lvl) <= static_cast<int>(log_level())) std::cerr << msg << "\n";
}

constexpr int kOk = 0;
constexpr int kFailedRun = 1;
constexpr int kConfigError = 2;

int cmd_run(const std::string& scenario, std::optional<std::uint64_t> seed,
            std::string out_dir, double goal_threshold) {
  using namespace quadnav;
  sim::Scenario sc;
  try {
    sc = sim::load_scenario(scenario);
    if (seed) sc.seed = *seed;
    sim::require_valid(sc);
  } catch (const Error& e) {
    log(Level::Error, std::string("config error: ") + e.what());
    return kConfigError;
  }
  if (out_dir.empty()) out_dir = "out/" + sc.name;

  log(Level::Info, "running " + sc.name + " seed " + std::to_string(sc.seed));
  const sim::RunResult run = sim::run_scenario(sc);
  io::write_run(run, out_dir);
  io::plot_run(out_dir);

  const sim::Metrics& m = run.metrics;
  std::cout << "status " << sim::to_string(m.status) << "\n"
            << "goal_error_m " << m.goal_error << "\n"
            << "max_speed_mps " << m.max_speed << "\n"
            << "min_clearance_m " << m.min_clearance << "\n"
            << "replans " << m.replan_count << "\n"
            << "output " << out_dir << "\n";
  if (log_level() >= Level::Debug) {
    for (const sim::ReplanEvent& e : run.log.replans) {
      if (e.status != sim::ReplanStatus::Ok) {
        log(Level::Debug, "replan " + std::to_string(e.id) + " t=" + std::to_string(e.t) + " " +
                              sim::to_string(e.status) + " " + e.detail);
      }
    }
  }
  const bool ok = m.status == sim::RunStatus::GoalReached && m.goal_error <= goal_threshold;
  if (!ok) log(Level::Warn, "run did not meet the goal criteria");
  return ok ? kOk : kFailedRun;
}

int cmd_plot(const std::string& dir) {
  try {
    quadnav::io::plot_run(dir);
  } catch (const quadnav::Error& e) {
    log(Level::Error, e.what());
    return kConfigError;
  }
  std::cout << "wrote " << (std::filesystem::path(dir) / "topdown.svg").string() << " and "
            << (std::filesystem::path(dir) / "timeseries.svg").string() << "\n";
  return kOk;
}

int cmd_validate(const std::string& scenario) {
  using namespace quadnav;
  sim::Scenario sc;
  try {
    sc = sim::load_scenario(scenario);
  } catch (const Error& e) {
    std::cout << e.what() << "\n";
    return kConfigError;
  }
  const auto problems = sim::validate(sc);
  for (const std::string& p : problems) std::cout << "violation: " << p << "\n";
  if (problems.empty()) std::cout << sc.name << ": ok\n";
  return problems.empty() ? kOk : kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrotor navigation simulator"};
  app.require_subcommand(1);

  std::string scenario, out_dir;
  std::optional<std::uint64_t> seed;
  double goal_threshold = 1.0;

  CLI::App* run = app.add_subcommand("run", "Run a scenario and write logs and plots");
  run->add_option("--scenario", scenario, "Scenario file or shipped scenario name")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory (default out/<name>)");
  run->add_option("--threshold-goal-m", goal_threshold, "Maximum goal error for success");

  std::string plot_dir;
  CLI::App* plot = app.add_subcommand("plot", "Render SVG plots from a run directory");
  plot->add_option("--out", plot_dir, "Run directory")->required();

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", validate_path, "Scenario file or shipped name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*run) return cmd_run(scenario, seed, out_dir, goal_threshold);
  if (*plot) return cmd_plot(plot_dir);
  if (*validate) return cmd_validate(validate_path);
  return kConfigError;
}
