#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "companion/care/profiles.hpp"
#include "companion/care/schedule.hpp"
#include "companion/care/vitals.hpp"

namespace companion::care {

struct CareParams {
  Thresholds thresholds;
  VitalsProfile profile;
  double vitals_period_s = 1.0;
  TimeOfDay start_time{7, 55};  // scheduler wall clock at sim time 0
  std::uint64_t seed = 0;
};

// The simulated wearable plus the reminder scheduler, driven by sim time.
class CareState {
 public:
  struct TickResult {
    std::vector<Alert> alerts;
    std::optional<VitalsSample> sample;    // set on ticks that sampled vitals
    std::optional<std::string> rejected;  // diagnostic for an implausible sample
  };

  explicit CareState(CareParams params, MedSchedule schedule = {});

  /// Samples vitals when a period boundary has been reached and runs the
  /// scheduler up to the wall clock matching sim time t.
  TickResult tick(double t);
  Alert emergency(double t);
  /// Throws ScheduleError when invalid; the running schedule is then kept.
  void set_schedule(MedSchedule schedule);

  double wall_clock(double t) const { return params_.start_time.seconds() + t; }
  const CareParams& params() const { return params_; }
  const MedSchedule& schedule() const { return schedule_; }
  const std::optional<VitalsSample>& latest() const { return latest_; }
  const HysteresisState& hysteresis() const { return hysteresis_; }
  const std::vector<Alert>& alert_log() const { return log_; }

 private:
  CareParams params_;
  MedSchedule schedule_;
  SchedulerState scheduler_;
  HysteresisState hysteresis_;
  std::optional<VitalsSample> latest_;
  std::int64_t next_sample_ = 1;  // index of the next vitals period boundary
  std::vector<Alert> log_;
};

}  // namespace companion::care
