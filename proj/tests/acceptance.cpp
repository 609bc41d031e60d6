// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "companion/care/care_state.hpp"
#include "companion/protocol/codec.hpp"
#include "companion/sim/acoustics.hpp"
#include "companion/sim/raycast.hpp"
#include "companion/sim/scenario.hpp"
#include "companion/supervisor/report.hpp"
#include "companion/supervisor/supervisor.hpp"
#include "oracles.hpp"

using namespace companion;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) detail << "failed: " << what << "; ";
    pass = pass && cond;
  }
};

std::string scenario_path(const std::string& name) {
  return std::string(COMPANION_SOURCE_DIR) + "/scenarios/" + name;
}

supervisor::Supervisor autonomous(const std::string& map) {
  supervisor::SupervisorConfig cfg;
  cfg.encoder_noise_ticks = 0.0;
  supervisor::Supervisor s(sim::load_scenario_file(scenario_path(map)), sim::RobotModel::make_default(), cfg, {});
  protocol::Message m;
  m.id = "go";
  m.payload = protocol::ModeSet{protocol::Mode::Autonomous};
  s.submit({supervisor::kLocalClient, m});
  return s;
}

void acoustics(Outcome& o) {
  o.require(sim::speed_of_sound(20.0) == 343.64, "speed_of_sound(20) == 343.64");
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> d(0.02, 6.0), t(-40.0, 60.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double dist = d(rng), temp = t(rng);
    const double tof = sim::time_of_flight(dist, temp);
    const double expect = 2.0 * dist / (331.5 + 0.607 * temp);
    worst = std::max(worst, std::abs(tof - expect) / expect);
    worst = std::max(worst, std::abs(sim::distance_from_tof(tof, temp) - dist) / dist);
  }
  o.require(worst <= 1e-12, "relative echo error <= 1e-12");
  o.detail << "c(20)=" << sim::speed_of_sound(20.0) << " worst_rel=" << worst;
}

void sensor_oracle(Outcome& o) {
  std::mt19937_64 rng(500);
  int cases = 0, hits = 0;
  double worst = 0.0;
  while (cases < 500) {
    const sim::World w = sim::load_scenario(oracle::random_map(rng, 12, 12, 0.1, 8));
    std::uniform_real_distribution<double> pos(0.1, 1.1), ang(-std::numbers::pi, std::numbers::pi), reach(0.05, 1.5);
    for (int i = 0; i < 5 && cases < 500; ++i) {
      const double x = pos(rng), y = pos(rng), a = ang(rng), range = reach(rng);
      if (oracle::blocked_at(w.grid, x, y)) continue;
      ++cases;
      const auto hit = sim::cast_ray(w.grid, {x, y}, a, range);
      const auto ref = oracle::march_ray(w.grid, x, y, a, range);
      o.require(hit.has_value() == ref.has_value(), "hit/miss agreement");
      if (hit && ref) {
        ++hits;
        worst = std::max(worst, std::abs(hit->distance - *ref));
      }
    }
  }
  o.require(worst <= 1e-6, "distance within 1e-6 m");
  o.detail << "cases=" << cases << " hits=" << hits << " worst=" << worst << "m";
}

void odometry(Outcome& o) {
  supervisor::Supervisor s = autonomous("pillars_20x20.map");
  double pos_err = 0.0, ang_err = 0.0;
  double travelled = 0.0;
  sim::Pose prev = s.world().true_pose;
  for (int t = 0; t < 10000; ++t) {
    s.tick();
    s.take_outbox();
    const sim::Pose& truth = s.world().true_pose;
    const sim::Pose& est = s.nav().est_pose;
    pos_err = std::max(pos_err, (truth.position - est.position).norm());
    ang_err = std::max(ang_err, std::abs(oracle::wrap(truth.theta - est.theta)));
    travelled += (truth.position - prev.position).norm();
    prev = truth;
  }
  o.require(pos_err <= 1e-5, "position error <= 1e-5 m");
  o.require(ang_err <= 1e-5, "heading error <= 1e-5 rad");
  o.require(travelled > 10.0, "robot actually moved");
  o.detail << "ticks=10000 travelled=" << travelled << "m pos_err=" << pos_err << " ang_err=" << ang_err;
}

void coverage(Outcome& o) {
  const struct {
    const char* map;
    double min_coverage;
  } cases[] = {{"open_room_20x20.map", 0.95}, {"pillars_20x20.map", 0.85},
               {"two_rooms_20x20.map", 0.85}, {"furniture_20x20.map", 0.85}};
  for (const auto& c : cases) {
    supervisor::Supervisor s = autonomous(c.map);
    for (int t = 0; t < 5000; ++t) s.tick();
    const auto r = supervisor::report_from_log(s.message_log());
    const std::string name = c.map;
    o.require(r.ticks == 5000, name + " ran 5000 ticks");
    o.require(r.coverage_fraction >= c.min_coverage, name + " coverage");
    o.require(r.collisions == 0, name + " collisions");
    o.require(r.violations.empty(), name + " log violations");
    if (name == "open_room_20x20.map") o.require(r.max_visit_count <= 6, name + " max visit count");
    o.detail << name.substr(0, name.find('_')) << "=" << r.coverage_fraction << "/max" << r.max_visit_count << " ";
  }
}

void care_rules(Outcome& o) {
  for (const char* name : {"fever_ramp", "tachy_burst"}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const care::VitalsProfile p = care::VitalsProfile::parse(name);
      const care::Thresholds th;
      care::HysteresisState st;
      std::map<care::AlertKind, int> got;
      std::vector<std::pair<double, double>> stream;
      for (int t = 1; t <= 3600; ++t) {
        const care::VitalsSample s = care::synthesize_vitals(p, t, seed);
        auto r = care::ingest_vitals(s, th, st);
        o.require(!r.rejected, "synthetic samples accepted");
        st = r.state;
        for (const auto& a : r.alerts) ++got[a.kind];
        stream.emplace_back(s.pulse_bpm, s.temp_c);
      }
      const auto expect = oracle::recount(stream, th);
      const bool same = got[care::AlertKind::PulseHigh] == expect.pulse_high &&
                        got[care::AlertKind::PulseLow] == expect.pulse_low &&
                        got[care::AlertKind::TempHigh] == expect.temp_high &&
                        got[care::AlertKind::TempLow] == expect.temp_low;
      o.require(same, std::string(name) + " alert count equals recount");
      if (seed == 1) {
        o.detail << name << "=" << expect.pulse_high + expect.pulse_low + expect.temp_high + expect.temp_low
                 << " ";
      }
    }
  }
  const care::MedSchedule sched{{{"a", "morning", {8, 0}, true},
                                 {"b", "noon", {12, 30}, true},
                                 {"c", "evening", {19, 45}, true},
                                 {"d", "midnight", {0, 0}, true}}};
  const double start = 7 * 3600 + 55 * 60, span = 3 * 86400.0;
  for (double period : {1.0, 10.0}) {
    care::SchedulerState st;
    int n = 0;
    const auto steps = static_cast<long>(std::llround(span / period));
    for (long k = 0; k <= steps; ++k) {
      auto r = care::tick_scheduler(sched, start + static_cast<double>(k) * period, std::move(st));
      st = std::move(r.state);
      n += static_cast<int>(r.reminders.size());
    }
    o.require(n == 12, "12 reminders at period " + std::to_string(period));
    o.detail << "reminders@" << period << "s=" << n << " ";
  }
}

void protocol_criterion(Outcome& o) {
  const auto corpus = oracle::message_corpus(2024, 330);
  std::set<std::string> types;
  int mismatches = 0;
  std::vector<std::string> seeds;
  for (const auto& m : corpus) {
    const std::string line = protocol::encode_message(m);
    seeds.push_back(line);
    types.insert(std::string(protocol::type_name(m.payload)));
    const auto back = protocol::decode_message(line);
    const auto* msg = std::get_if<protocol::Message>(&back);
    if (msg == nullptr || !(*msg == m) || protocol::encode_message(*msg) != line) ++mismatches;
  }
  o.require(mismatches == 0, "round-trip identity");
  o.require(types.size() == 11, "all 11 types covered");

  std::mt19937_64 rng(100000);
  int crashes = 0, errors = 0;
  for (int i = 0; i < 100000; ++i) {
    std::string line = seeds[rng() % seeds.size()];
    switch (rng() % 5) {
      case 0:
        for (auto& c : line) c = static_cast<char>(rng());
        break;
      case 1:
        line.resize(rng() % (line.size() + 1));
        break;
      case 2:
        for (int k = 0; k < 4; ++k) line[rng() % line.size()] = static_cast<char>(rng());
        break;
      case 3:
        line.insert(rng() % line.size(), std::string(1 + rng() % 8, "{}[]\",:0e-\\"[rng() % 11]));
        break;
      default:
        line = std::string(rng() % 64, static_cast<char>(rng()));
    }
    try {
      errors += std::holds_alternative<protocol::DecodeError>(protocol::decode_message(line));
    } catch (...) {
      ++crashes;
    }
  }
  o.require(crashes == 0, "fuzzing raised no exceptions");
  o.detail << "corpus=" << corpus.size() << " types=" << types.size() << " fuzz=100000 typed_errors=" << errors
           << " crashes=" << crashes;
}

std::string run_cli(const std::string& args, int& status) {
  const std::string cmd = std::string(COMPANION_CLI) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int raw = pclose(p);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

void determinism(Outcome& o) {
  const std::string args =
      "--scenario " + scenario_path("furniture_20x20.map") + " --mode autonomous --ticks 2000 --seed 42";
  std::string hashes[2];
  for (auto& h : hashes) {
    int status = 0;
    const std::string out = run_cli(args, status);
    o.require(status == 0, "CLI exit status 0");
    if (status != 0) return;
    h = nlohmann::json::parse(out).at("message_log_hash").get<std::string>();
  }
  o.require(hashes[0] == hashes[1], "identical message_log_hash");
  o.require(hashes[0].size() == 64, "hash is SHA-256 hex");
  o.detail << "hash=" << hashes[0].substr(0, 16) << "...";
}

}  // namespace

int main() {
  const struct {
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> body;
  } criteria[] = {{"acoustics", 1.0, acoustics},     {"sensor_oracle", 10.0, sensor_oracle},
                  {"odometry", 5.0, odometry},       {"coverage", 30.0, coverage},
                  {"care_rules", 5.0, care_rules},   {"protocol", 30.0, protocol_criterion},
                  {"determinism", 10.0, determinism}};
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget_s, "runtime budget " + std::to_string(c.budget_s) + " s");
    failed += !o.pass;
    std::printf("%s %s %.3fs %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.str().c_str());
  }
  return failed == 0 ? 0 : 1;
}
