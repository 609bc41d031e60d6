#include "companion/care/care_state.hpp"

#include <cmath>
#include <stdexcept>

namespace companion::care {

CareState::CareState(CareParams params, MedSchedule schedule)
    : params_(std::move(params)), schedule_(std::move(schedule)) {
  params_.thresholds.validate();
  if (!(params_.vitals_period_s > 0.0)) throw std::invalid_argument("vitals period must be positive");
  schedule_.validate();
  scheduler_ = tick_scheduler(schedule_, wall_clock(0.0), {}).state;
}

CareState::TickResult CareState::tick(double t) {
  TickResult out;
  // Small slack so t = k * dt lands on the boundary despite rounding.
  const double boundary = static_cast<double>(next_sample_) * params_.vitals_period_s;
  if (t + 1e-9 >= boundary) {
    next_sample_ = static_cast<std::int64_t>(std::floor(t / params_.vitals_period_s + 1e-9)) + 1;
    const VitalsSample s = synthesize_vitals(params_.profile, t, params_.seed);
    IngestResult r = ingest_vitals(s, params_.thresholds, hysteresis_);
    if (r.rejected) {
      out.rejected = std::move(r.rejected);
    } else {
      hysteresis_ = r.state;
      latest_ = s;
      out.sample = s;
      out.alerts = std::move(r.alerts);
    }
  }
  SchedulerResult sr = tick_scheduler(schedule_, wall_clock(t), std::move(scheduler_));
  scheduler_ = std::move(sr.state);
  for (Alert& a : sr.reminders) {
    a.timestamp = t;
    out.alerts.push_back(std::move(a));
  }
  log_.insert(log_.end(), out.alerts.begin(), out.alerts.end());
  return out;
}

Alert CareState::emergency(double t) {
  log_.push_back(press_emergency(t));
  return log_.back();
}

void CareState::set_schedule(MedSchedule schedule) {
  schedule.validate();
  schedule_ = std::move(schedule);
}

}  // namespace companion::care
