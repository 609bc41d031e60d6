#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "companion/sim/acoustics.hpp"
#include "companion/supervisor/supervisor.hpp"

namespace companion::app {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Everything a run needs. Built-in defaults live in the member initializers.
struct RunOptions {
  std::string scenario;
  std::uint64_t ticks = 0;
  protocol::Mode mode = protocol::Mode::Manual;
  std::optional<std::uint64_t> seed;  // falls back to the scenario's seed
  std::optional<std::string> script;
  bool serve = false;
  std::string bind_address = "127.0.0.1";
  std::uint16_t port = 8790;
  std::size_t client_queue = 1024;
  std::optional<std::string> report_path;
  std::optional<std::string> log_path;

  supervisor::SupervisorConfig supervisor;
  std::string vitals_profile = "steady";
  double vitals_noise = 1.0;

  double wheel_radius = 0.032;
  double wheel_base = 0.14;
  int ticks_per_rev = 360;
  double max_wheel_rpm = 500.0;
  double body_radius = 0.11;
  double frequency_khz = 40.0;
  sim::RangeTable range_table;

  sim::RobotModel robot_model() const;
};

/// Applies `key = value` lines ('#' starts a comment). Unknown keys and bad
/// values throw ConfigError naming the line.
void apply_config_text(RunOptions& opts, std::string_view text);
void apply_config_file(RunOptions& opts, const std::string& path);

/// Sets a single key; throws ConfigError with line 0 on failure.
void apply_setting(RunOptions& opts, std::string_view key, std::string_view value);

}  // namespace companion::app
