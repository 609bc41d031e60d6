#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "companion/care/vitals.hpp"

namespace companion::care {

inline constexpr double kSecondsPerDay = 86400.0;

struct TimeOfDay {
  int hour = 0;
  int minute = 0;

  int minutes() const { return hour * 60 + minute; }
  double seconds() const { return minutes() * 60.0; }
  auto operator<=>(const TimeOfDay&) const = default;
};

/// Strict "HH:MM", 00:00 to 23:59.
std::optional<TimeOfDay> parse_time_of_day(std::string_view s);
std::string format_time_of_day(TimeOfDay t);

struct MedEntry {
  std::string id;
  std::string label;
  TimeOfDay time_of_day;
  bool enabled = true;

  bool operator==(const MedEntry&) const = default;
};

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MedSchedule {
  std::vector<MedEntry> entries;

  /// Throws ScheduleError on empty or duplicate ids.
  void validate() const;
  bool operator==(const MedSchedule&) const = default;
};

/// Same document as the med_schedule_set payload:
/// {"entries":[{"enabled":true,"id":"m1","label":"...","time_of_day":"08:00"}]}
nlohmann::json schedule_to_json(const MedSchedule& s);
/// Throws ScheduleError when the document does not have exactly that shape.
MedSchedule schedule_from_json(const nlohmann::json& j);

MedSchedule load_schedule_file(const std::string& path);
void save_schedule_file(const MedSchedule& s, const std::string& path);

// Scheduler memory between ticks. The clock is wall-clock seconds counted from
// midnight of day 0.
struct SchedulerState {
  std::optional<double> last_clock;  // unset before the first tick
  std::int64_t day = 0;
  std::set<std::string> fired_today;

  bool operator==(const SchedulerState&) const = default;
};

struct SchedulerResult {
  std::vector<Alert> reminders;  // timestamped with the clock value passed in
  SchedulerState state;
};

/// Fires MED_REMINDER for every enabled entry whose time of day falls in
/// (last_clock, clock] and has not fired on that day yet. Several days may be
/// crossed in one call; reminders come out in time order, ties by entry id.
/// The first call only records the clock. Throws std::invalid_argument when
/// the clock runs backwards.
SchedulerResult tick_scheduler(const MedSchedule& sched, double clock, SchedulerState state);

}  // namespace companion::care
