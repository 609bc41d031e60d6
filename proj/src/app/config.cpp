#include "companion/app/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "companion/care/schedule.hpp"

namespace companion::app {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, const char* want) {
  throw ConfigError(0, std::string(key) + ": '" + std::string(value) + "' is not " + want);
}

double as_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(x)) bad(key, v, "a number");
  return x;
}

template <class Int>
Int as_int(std::string_view key, std::string_view v) {
  Int x{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size()) bad(key, v, "an integer in range");
  return x;
}

bool as_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v, "a boolean");
}

using Setter = std::function<void(RunOptions&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"scenario", [](RunOptions& o, auto, auto v) { o.scenario = std::string(v); }},
      {"ticks", [](RunOptions& o, auto k, auto v) { o.ticks = as_int<std::uint64_t>(k, v); }},
      {"mode",
       [](RunOptions& o, auto k, auto v) {
         if (v == "manual" || v == "MANUAL") {
           o.mode = protocol::Mode::Manual;
         } else if (v == "autonomous" || v == "AUTONOMOUS") {
           o.mode = protocol::Mode::Autonomous;
         } else {
           bad(k, v, "manual or autonomous");
         }
       }},
      {"seed", [](RunOptions& o, auto k, auto v) { o.seed = as_int<std::uint64_t>(k, v); }},
      {"script", [](RunOptions& o, auto, auto v) { o.script = std::string(v); }},
      {"serve", [](RunOptions& o, auto k, auto v) { o.serve = as_bool(k, v); }},
      {"bind", [](RunOptions& o, auto, auto v) { o.bind_address = std::string(v); }},
      {"port", [](RunOptions& o, auto k, auto v) { o.port = as_int<std::uint16_t>(k, v); }},
      {"client_queue", [](RunOptions& o, auto k, auto v) { o.client_queue = as_int<std::size_t>(k, v); }},
      {"report", [](RunOptions& o, auto, auto v) { o.report_path = std::string(v); }},
      {"log", [](RunOptions& o, auto, auto v) { o.log_path = std::string(v); }},

      {"dt", [](RunOptions& o, auto k, auto v) { o.supervisor.dt = as_double(k, v); }},
      {"frame_every", [](RunOptions& o, auto k, auto v) { o.supervisor.frame_every = as_int<int>(k, v); }},
      {"clear_threshold", [](RunOptions& o, auto k, auto v) { o.supervisor.clear_threshold = as_double(k, v); }},
      {"cruise_ticks", [](RunOptions& o, auto k, auto v) { o.supervisor.driver.cruise_ticks = as_int<int>(k, v); }},
      {"turn_ticks", [](RunOptions& o, auto k, auto v) { o.supervisor.driver.turn_ticks = as_int<int>(k, v); }},
      {"encoder_noise_ticks",
       [](RunOptions& o, auto k, auto v) { o.supervisor.encoder_noise_ticks = as_double(k, v); }},
      {"schedule_file", [](RunOptions& o, auto, auto v) { o.supervisor.schedule_file = std::string(v); }},

      {"pulse_low", [](RunOptions& o, auto k, auto v) { o.supervisor.care.thresholds.pulse_low = as_double(k, v); }},
      {"pulse_high", [](RunOptions& o, auto k, auto v) { o.supervisor.care.thresholds.pulse_high = as_double(k, v); }},
      {"temp_low", [](RunOptions& o, auto k, auto v) { o.supervisor.care.thresholds.temp_low = as_double(k, v); }},
      {"temp_high", [](RunOptions& o, auto k, auto v) { o.supervisor.care.thresholds.temp_high = as_double(k, v); }},
      {"vitals_period", [](RunOptions& o, auto k, auto v) { o.supervisor.care.vitals_period_s = as_double(k, v); }},
      {"vitals_profile", [](RunOptions& o, auto, auto v) { o.vitals_profile = std::string(v); }},
      {"vitals_noise", [](RunOptions& o, auto k, auto v) { o.vitals_noise = as_double(k, v); }},
      {"start_time",
       [](RunOptions& o, auto k, auto v) {
         const auto t = care::parse_time_of_day(v);
         if (!t) bad(k, v, "HH:MM");
         o.supervisor.care.start_time = *t;
       }},

      {"wheel_radius", [](RunOptions& o, auto k, auto v) { o.wheel_radius = as_double(k, v); }},
      {"wheel_base", [](RunOptions& o, auto k, auto v) { o.wheel_base = as_double(k, v); }},
      {"ticks_per_rev", [](RunOptions& o, auto k, auto v) { o.ticks_per_rev = as_int<int>(k, v); }},
      {"max_wheel_rpm", [](RunOptions& o, auto k, auto v) { o.max_wheel_rpm = as_double(k, v); }},
      {"body_radius", [](RunOptions& o, auto k, auto v) { o.body_radius = as_double(k, v); }},
      {"frequency_khz", [](RunOptions& o, auto k, auto v) { o.frequency_khz = as_double(k, v); }},
      {"range_table",
       [](RunOptions& o, auto k, auto v) {
         try {
           o.range_table = sim::RangeTable::parse(v);
         } catch (const std::exception& e) {
           throw ConfigError(0, std::string(k) + ": " + e.what());
         }
       }},
  };
  return table;
}

}  // namespace

sim::RobotModel RunOptions::robot_model() const {
  sim::RobotModel m = sim::RobotModel::make_default(range_table, frequency_khz);
  m.wheel_radius = wheel_radius;
  m.wheel_base = wheel_base;
  m.ticks_per_rev = ticks_per_rev;
  m.max_wheel_rpm = max_wheel_rpm;
  m.body_radius = body_radius;
  m.validate();
  return m;
}

void apply_setting(RunOptions& opts, std::string_view key, std::string_view value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError(0, "unknown key '" + std::string(key) + "'");
  it->second(opts, key, value);
}

void apply_config_text(RunOptions& opts, std::string_view text) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      apply_setting(opts, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(line_no, e.what());
    }
  }
}

void apply_config_file(RunOptions& opts, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(opts, ss.str());
}

}  // namespace companion::app
