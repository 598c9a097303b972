// hadal_sim: run, validate and summarize recovery-mission scenarios.

#include "hadal/errors.hpp"
#include "hadal/logging.hpp"
#include "hadal/scenario.hpp"
#include "hadal/simulation.hpp"
#include "hadal/summary.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;

namespace {

constexpr int kExitDone = 0;
constexpr int kExitFailure = 1;
constexpr int kExitAbort = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitUsage = 64;

int usage_error(const CLI::App& app, const std::string& message) {
  std::cerr << "error: " << message << "\n\n" << app.help();
  return kExitUsage;
}

fs::path output_directory(const std::optional<std::string>& flag, const hadal::ScenarioConfig& config) {
  if (flag) return *flag;
  if (const char* env = std::getenv("HADAL_OUT_DIR"); env && *env) return env;
  return config.simulation.log_dir;
}

int exit_code(const hadal::Outcome& outcome) {
  switch (outcome.kind) {
    case hadal::OutcomeKind::Done: return kExitDone;
    case hadal::OutcomeKind::Abort: return kExitAbort;
    case hadal::OutcomeKind::Timeout: return kExitTimeout;
  }
  return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hadal-zone recovery mission simulator"};
  app.set_version_flag("--version", std::string("hadal_sim ") + HADAL_VERSION);
  app.require_subcommand(1);

  std::string run_scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> max_time;
  CLI::App* run = app.add_subcommand("run", "run a scenario and write logs");
  run->add_option("scenario", run_scenario, "scenario file or directory containing scenario.yaml")->required();
  run->add_option("--seed", seed, "sensor noise seed (overrides sensors.rng_seed)");
  run->add_option("--out", out_dir, "log directory (overrides HADAL_OUT_DIR and simulation.log_dir)");
  run->add_option("--max-time", max_time, "simulated time limit in seconds")->check(CLI::PositiveNumber);

  std::string log_dir;
  CLI::App* summarize = app.add_subcommand("summarize", "summarize a log directory");
  summarize->add_option("log-dir", log_dir, "directory written by run")->required();

  std::string validate_scenario;
  CLI::App* validate = app.add_subcommand("validate", "load and validate a scenario");
  validate->add_option("scenario", validate_scenario, "scenario file or directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    CLI::App* failing = &app;
    for (CLI::App* sub : {run, summarize, validate}) {
      if (sub->parsed()) failing = sub;
    }
    return usage_error(*failing, e.what());
  }

  if (validate->parsed()) {
    try {
      const hadal::ScenarioConfig config = hadal::load_scenario_file(validate_scenario);
      std::cout << "ok: " << config.name << '\n';
      return kExitDone;
    } catch (const hadal::Error& e) {
      std::cerr << "invalid: " << e.what() << '\n';
      return kExitFailure;
    }
  }

  if (summarize->parsed()) {
    if (!fs::is_directory(log_dir)) return usage_error(*summarize, "no such log directory: " + log_dir);
    try {
      const hadal::RunSummary summary = hadal::summarize_directory(log_dir);
      hadal::write_error_series(summary, fs::path(log_dir) / hadal::kErrorSeriesFile);
      hadal::write_phase_timeline(summary, fs::path(log_dir) / hadal::kPhaseTimelineFile);
      std::cout << hadal::summary_json(summary) << '\n';
      return kExitDone;
    } catch (const hadal::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitFailure;
    }
  }

  // run
  std::error_code ec;
  if (!fs::exists(hadal::resolve_scenario_path(run_scenario), ec)) {
    return usage_error(*run, "scenario not found: " + run_scenario);
  }
  try {
    const hadal::ScenarioConfig config = hadal::load_scenario_file(run_scenario);
    const fs::path out = output_directory(out_dir, config);
    hadal::RunOptions options;
    options.seed = seed;
    options.max_sim_time = max_time;
    hadal::RunSummary summary;
    {
      hadal::FileLogWriter writer(out);
      summary = hadal::run_simulation(config, &writer, options);
      writer.close();
    }
    hadal::write_summary_products(summary, out);
    std::cout << "logs: " << out.string() << '\n' << hadal::summary_json(summary) << '\n';
    return exit_code(summary.outcome);
  } catch (const hadal::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
