#include "companion/app/runner.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "companion/care/profiles.hpp"
#include "companion/protocol/codec.hpp"
#include "companion/server/server.hpp"
#include "companion/sim/scenario.hpp"
#include "companion/supervisor/report.hpp"
#include "companion/supervisor/supervisor.hpp"

namespace companion::app {

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_sigint(int) { g_interrupted = 1; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<ScriptLine> parse_script(std::string_view text) {
  std::vector<ScriptLine> lines;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string_view::npos || line[start] == '#') continue;
    line.remove_prefix(start);
    const auto space = line.find_first_of(" \t");
    if (space == std::string_view::npos) throw ScriptError(line_no, "expected '<tick> <message>'");
    ScriptLine s;
    const auto [p, ec] = std::from_chars(line.data(), line.data() + space, s.tick);
    if (ec != std::errc{} || p != line.data() + space) throw ScriptError(line_no, "bad tick offset");
    auto decoded = protocol::decode_message(line.substr(space + 1));
    if (const auto* e = std::get_if<protocol::DecodeError>(&decoded)) {
      throw ScriptError(line_no, std::string(protocol::to_string(e->code)) + " " + e->field + " " + e->detail);
    }
    s.message = std::get<protocol::Message>(std::move(decoded));
    if (!s.message.id) throw ScriptError(line_no, "script messages are commands and need an id");
    if (!lines.empty() && s.tick < lines.back().tick) throw ScriptError(line_no, "tick offsets must not decrease");
    lines.push_back(std::move(s));
  }
  return lines;
}

int run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.scenario.empty()) {
    err << "error: --scenario is required\n";
    return kExitUsage;
  }

  sim::World world;
  try {
    world = sim::load_scenario_file(opts.scenario);
  } catch (const std::exception& e) {
    err << "scenario " << opts.scenario << ": " << e.what() << '\n';
    return kExitInput;
  }
  if (opts.seed) world.rng_seed = *opts.seed;

  sim::RobotModel model;
  supervisor::SupervisorConfig cfg = opts.supervisor;
  try {
    model = opts.robot_model();
    cfg.care.seed = world.rng_seed;
    cfg.care.profile = care::VitalsProfile::parse(opts.vitals_profile);
    cfg.care.profile.noise_scale = opts.vitals_noise;
  } catch (const care::ProfileError& e) {
    err << "vitals profile: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "configuration: " << e.what() << '\n';
    return kExitUsage;
  }

  care::MedSchedule schedule;
  if (cfg.schedule_file && std::ifstream(*cfg.schedule_file).good()) {
    try {
      schedule = care::load_schedule_file(*cfg.schedule_file);
    } catch (const std::exception& e) {
      err << "schedule: " << e.what() << '\n';
      return kExitInput;
    }
  }

  std::vector<ScriptLine> script;
  if (opts.script) {
    try {
      script = parse_script(read_file(*opts.script));
    } catch (const std::exception& e) {
      err << "script " << *opts.script << ": " << e.what() << '\n';
      return kExitInput;
    }
  }

  std::optional<supervisor::Supervisor> sup;
  try {
    sup.emplace(std::move(world), model, cfg, std::move(schedule));
  } catch (const std::exception& e) {
    err << "configuration: " << e.what() << '\n';
    return kExitUsage;
  }

  std::optional<server::Server> srv;
  if (opts.serve) {
    srv.emplace(server::ServerOptions{opts.bind_address, opts.port, opts.client_queue});
    try {
      srv->start();
    } catch (const std::exception& e) {
      err << "server: " << e.what() << '\n';
      return kExitServer;
    }
    err << "listening on " << opts.bind_address << ':' << srv->port() << " (WebSocket /ws or raw TCP)\n";
  }

  if (opts.mode == protocol::Mode::Autonomous) {
    protocol::Message m;
    m.id = "cli-mode";
    m.payload = protocol::ModeSet{protocol::Mode::Autonomous};
    sup->submit({supervisor::kLocalClient, std::move(m)});
  }

  auto publish = [&] {
    auto outbox = sup->take_outbox();
    if (!srv) return;
    srv->set_mode(sup->mode());
    for (const auto& o : outbox) srv->publish(o);
  };
  publish();

  g_interrupted = 0;
  auto previous = std::signal(SIGINT, on_sigint);
  const bool forever = opts.serve && opts.ticks == 0;
  const auto period = std::chrono::duration<double>(cfg.dt);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t next_line = 0;
  for (std::uint64_t k = 0; (forever || k < opts.ticks) && !g_interrupted; ++k) {
    while (next_line < script.size() && script[next_line].tick <= k) {
      sup->submit({supervisor::kLocalClient, script[next_line++].message});
    }
    if (srv) {
      for (auto& cmd : srv->drain()) sup->submit(std::move(cmd));
    }
    sup->tick();
    publish();
    if (srv) {
      std::this_thread::sleep_until(t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                             period * static_cast<double>(k + 1)));
    }
  }
  std::signal(SIGINT, previous);
  if (next_line < script.size()) {
    err << "note: " << script.size() - next_line << " script line(s) fall after the last tick\n";
  }
  if (srv) srv->stop();

  const supervisor::RunReport report = supervisor::report_from_log(sup->message_log());
  const std::string text = report_to_json(report).dump(2) + "\n";
  out << text;
  if (opts.report_path) {
    std::ofstream f(*opts.report_path);
    f << text;
    if (!f) err << "cannot write report to " << *opts.report_path << '\n';
  }
  if (opts.log_path) {
    std::ofstream f(*opts.log_path, std::ios::binary);
    for (const auto& line : sup->message_log()) f << line;
    if (!f) err << "cannot write message log to " << *opts.log_path << '\n';
  }
  for (const auto& v : report.violations) err << "violation: " << v << '\n';
  return report.violations.empty() ? kExitOk : kExitViolations;
}

}  // namespace companion::app
