// companion: headless runner for the simulator, supervisor and protocol server.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "companion/app/config.hpp"
#include "companion/app/runner.hpp"

using namespace companion;

int main(int argc, char** argv) {
  CLI::App cli{"Deterministic companion robot simulator and control service"};
  std::optional<std::string> scenario, mode, script, config, report, log, bind;
  std::optional<std::uint64_t> ticks, seed;
  std::optional<std::uint16_t> port;
  bool serve = false;
  cli.add_option("--scenario", scenario, "scenario map file");
  cli.add_option("--ticks", ticks, "control periods to run (0 with --serve runs until Ctrl-C)");
  cli.add_option("--mode", mode, "starting mode")->transform(CLI::IsMember({"manual", "autonomous"}, CLI::ignore_case));
  cli.add_option("--seed", seed, "RNG seed (defaults to the scenario's seed)");
  cli.add_option("--script", script, "command trace: '<tick> <message json>' per line");
  cli.add_flag("--serve", serve, "open the protocol port and pace ticks in real time");
  cli.add_option("--port", port, "protocol port (default 8790, 0 picks a free one)");
  cli.add_option("--bind", bind, "bind address (default 127.0.0.1)");
  cli.add_option("--config", config, "key = value configuration file");
  cli.add_option("--report", report, "also write the report JSON here");
  cli.add_option("--log", log, "write the canonical message log here");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return app::kExitUsage;
  }

  app::RunOptions opts;
  if (config) {
    try {
      app::apply_config_file(opts, *config);
    } catch (const std::exception& e) {
      std::cerr << *config << ": " << e.what() << '\n';
      return app::kExitInput;
    }
  }
  if (scenario) opts.scenario = *scenario;
  if (ticks) opts.ticks = *ticks;
  try {
    if (mode) app::apply_setting(opts, "mode", *mode);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return app::kExitUsage;
  }
  if (seed) opts.seed = seed;
  if (script) opts.script = script;
  if (serve) opts.serve = true;
  if (port) opts.port = *port;
  if (bind) opts.bind_address = *bind;
  if (report) opts.report_path = report;
  if (log) opts.log_path = log;

  return app::run(opts, std::cout, std::cerr);
}
