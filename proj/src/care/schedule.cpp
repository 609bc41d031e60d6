#include "companion/care/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace companion::care {

std::optional<TimeOfDay> parse_time_of_day(std::string_view s) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (s.size() != 5 || s[2] != ':' || !digit(s[0]) || !digit(s[1]) || !digit(s[3]) ||
      !digit(s[4])) {
    return std::nullopt;
  }
  const int h = (s[0] - '0') * 10 + (s[1] - '0');
  const int m = (s[3] - '0') * 10 + (s[4] - '0');
  if (h > 23 || m > 59) return std::nullopt;
  return TimeOfDay{h, m};
}

std::string format_time_of_day(TimeOfDay t) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", t.hour, t.minute);
  return buf;
}

void MedSchedule::validate() const {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.id.empty()) throw ScheduleError("schedule entry with empty id");
    if (!seen.insert(e.id).second) throw ScheduleError("duplicate schedule id '" + e.id + "'");
  }
}

nlohmann::json schedule_to_json(const MedSchedule& s) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : s.entries) {
    entries.push_back({{"id", e.id},
                       {"label", e.label},
                       {"time_of_day", format_time_of_day(e.time_of_day)},
                       {"enabled", e.enabled}});
  }
  return {{"entries", std::move(entries)}};
}

MedSchedule schedule_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1 || !j.contains("entries") || !j["entries"].is_array()) {
    throw ScheduleError("schedule must be an object with a single 'entries' array");
  }
  MedSchedule s;
  for (const auto& item : j["entries"]) {
    if (!item.is_object()) throw ScheduleError("schedule entry must be an object");
    for (const auto& [key, _] : item.items()) {
      if (key != "id" && key != "label" && key != "time_of_day" && key != "enabled") {
        throw ScheduleError("unknown schedule entry field '" + key + "'");
      }
    }
    auto field = [&](const char* name) -> const nlohmann::json& {
      if (!item.contains(name)) throw ScheduleError(std::string("schedule entry missing '") + name + "'");
      return item[name];
    };
    const auto& id = field("id");
    const auto& label = field("label");
    const auto& tod = field("time_of_day");
    const auto& enabled = field("enabled");
    if (!id.is_string() || !label.is_string() || !tod.is_string() || !enabled.is_boolean()) {
      throw ScheduleError("schedule entry field has the wrong type");
    }
    const auto t = parse_time_of_day(tod.get<std::string>());
    if (!t) throw ScheduleError("bad time_of_day '" + tod.get<std::string>() + "'");
    s.entries.push_back({id.get<std::string>(), label.get<std::string>(), *t, enabled.get<bool>()});
  }
  s.validate();
  return s;
}

MedSchedule load_schedule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScheduleError("cannot open schedule file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw ScheduleError("schedule file " + path + " is not valid JSON");
  return schedule_from_json(j);
}

void save_schedule_file(const MedSchedule& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScheduleError("cannot write schedule file " + path);
  out << schedule_to_json(s).dump(2) << '\n';
}

SchedulerResult tick_scheduler(const MedSchedule& sched, double clock, SchedulerState state) {
  SchedulerResult out;
  if (!std::isfinite(clock)) throw std::invalid_argument("tick_scheduler: non-finite clock");
  if (!state.last_clock) {
    state.last_clock = clock;
    state.day = static_cast<std::int64_t>(std::floor(clock / kSecondsPerDay));
    out.state = std::move(state);
    return out;
  }
  const double last = *state.last_clock;
  if (clock < last) throw std::invalid_argument("tick_scheduler: clock went backwards");

  std::vector<const MedEntry*> order;
  for (const auto& e : sched.entries) {
    if (e.enabled) order.push_back(&e);
  }
  std::sort(order.begin(), order.end(), [](const MedEntry* a, const MedEntry* b) {
    return std::tie(a->time_of_day, a->id) < std::tie(b->time_of_day, b->id);
  });

  const auto last_day = static_cast<std::int64_t>(std::floor(clock / kSecondsPerDay));
  for (std::int64_t d = state.day; d <= last_day; ++d) {
    if (d != state.day) {
      state.day = d;
      state.fired_today.clear();
    }
    const double midnight = static_cast<double>(d) * kSecondsPerDay;
    for (const MedEntry* e : order) {
      const double at = midnight + e->time_of_day.seconds();
      if (at <= last || at > clock || state.fired_today.count(e->id) != 0) continue;
      state.fired_today.insert(e->id);
      out.reminders.push_back({AlertKind::MedReminder, clock, std::nullopt, e->id, e->label});
    }
  }
  state.last_clock = clock;
  out.state = std::move(state);
  return out;
}

}  // namespace companion::care
