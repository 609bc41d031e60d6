#include "companion/control/driver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace companion::control {

namespace {

constexpr double kEighth = std::numbers::pi / 4.0;

// How far off a cell center still counts as being on it.
constexpr double kCenterTolerance = 0.01;

struct Candidate {
  nav::Action action;
  sim::SensorSlot slot;
};

constexpr std::array<Candidate, 5> kCandidates{{
    {nav::Action::Forward, sim::SensorSlot::Front},
    {nav::Action::TurnLeft45, sim::SensorSlot::FrontLeft},
    {nav::Action::TurnRight45, sim::SensorSlot::FrontRight},
    {nav::Action::TurnLeft90, sim::SensorSlot::Left},
    {nav::Action::TurnRight90, sim::SensorSlot::Right},
}};

/// Compass slot 0..7 nearest to `theta`; slot k points along k * 45 degrees.
int heading_slot(double theta) {
  const long k = std::lround(theta / kEighth);
  return static_cast<int>(((k % 8) + 8) % 8);
}

// Cell offsets for the eight compass slots (x east, y south).
constexpr std::array<int, 8> kSlotDx{1, 1, 0, -1, -1, -1, 0, 1};
constexpr std::array<int, 8> kSlotDy{0, 1, 1, 1, 0, -1, -1, -1};

/// Reading of the sensor looking `relative` radians off the heading; nullptr
/// when no sensor points that way.
const sim::UltrasonicReading* reading_toward(const sim::UltrasonicSweep& sweep,
                                             const sim::RobotModel& model, double relative) {
  for (const auto& r : sweep) {
    if (std::abs(sim::angle_difference(model.sensors[r.sensor_index].bearing, relative)) < 1e-6) {
      return &r;
    }
  }
  return nullptr;
}

bool farther_than(const sim::UltrasonicReading* r, double limit) {
  return r != nullptr && (!r->distance_m || *r->distance_m > limit);
}

sim::Vec2<double> cell_center_of(const sim::Vec2<double>& p, double cell_size) {
  return {(std::floor(p.x() / cell_size) + 0.5) * cell_size,
          (std::floor(p.y() / cell_size) + 0.5) * cell_size};
}

}  // namespace

void CoverageDriver::engage() { phase_ = Phase::Sweep; }

void CoverageDriver::disengage() { phase_ = Phase::Idle; }

sim::WheelCommand CoverageDriver::turn_command(const nav::NavState& nav,
                                               const sim::RobotModel& model, double dt) const {
  const double remaining = sim::angle_difference(target_heading_, nav.est_pose.theta);
  // Heading change from one tick forward on the left wheel and one back on the right.
  const double per_tick = 2.0 * model.metres_per_tick() / model.wheel_base;
  // Biased rounding: a residual of exactly half a quantum must not ping-pong.
  const auto ticks = static_cast<std::int64_t>(
      std::min<double>(params_.turn_ticks, std::round(std::abs(remaining) / per_tick - 0.01)));
  const std::int64_t signed_ticks = remaining >= 0 ? ticks : -ticks;
  return sim::wheel_command_for_ticks(model, signed_ticks, -signed_ticks, dt);
}

sim::WheelCommand CoverageDriver::forward_command(const nav::NavState& nav,
                                                  const sim::RobotModel& model,
                                                  double dt) const {
  const double along = (waypoint_ - nav.est_pose.position).dot(sim::heading_vector(nav.est_pose.theta));
  const double ticks =
      std::min<double>(params_.cruise_ticks, std::max(0.0, std::round(along / model.metres_per_tick())));
  const auto t = static_cast<std::int64_t>(ticks);
  return sim::wheel_command_for_ticks(model, t, t, dt);
}

CoverageDriver::Step CoverageDriver::move_on(const nav::NavState& nav,
                                             const sim::RobotModel& model, double dt) {
  if (phase_ == Phase::Turning) {
    const sim::WheelCommand cmd = turn_command(nav, model, dt);
    if (cmd.left != 0.0) return {cmd, std::nullopt, false};
    phase_ = Phase::Forward;
  }
  if (phase_ == Phase::Forward) {
    const sim::WheelCommand cmd = forward_command(nav, model, dt);
    if (cmd.left != 0.0) return {cmd, std::nullopt, false};
    phase_ = Phase::Idle;
  }
  return {};
}

CoverageDriver::Step CoverageDriver::decide(const nav::NavState& nav,
                                            const sim::UltrasonicSweep& sweep,
                                            const nav::NavParams& nav_params,
                                            const sim::RobotModel& model, double dt) {
  nav::ClearanceSet clearance = nav::classify_clearance(sweep, nav_params);
  const double cs = nav_params.cell_size;
  const int here = heading_slot(nav.est_pose.theta);
  for (const Candidate& c : kCandidates) {
    const double delta = nav::action_heading_delta(c.action);
    const bool diagonal = (heading_slot(nav.est_pose.theta + delta) % 2) == 1;
    bool open = farther_than(reading_toward(sweep, model, delta), diagonal ? cs * std::numbers::sqrt2 : cs);
    if (diagonal) {
      open = open && farther_than(reading_toward(sweep, model, delta - kEighth), cs) &&
             farther_than(reading_toward(sweep, model, delta + kEighth), cs);
    }
    if (!open) clearance.clear[static_cast<int>(c.slot)] = false;
  }

  Step out;
  out.decision = nav::choose_heading(nav, clearance, nav_params);
  const double delta = nav::action_heading_delta(out.decision->action);
  if (out.decision->action == nav::Action::Rotate180) {
    target_heading_ = sim::normalize_angle((here + 4) * kEighth);
    waypoint_ = nav.est_pose.position;
  } else {
    const int slot = heading_slot(nav.est_pose.theta + delta);
    const sim::Vec2<double> center = cell_center_of(nav.est_pose.position, cs);
    waypoint_ = center + sim::Vec2<double>(kSlotDx[slot] * cs, kSlotDy[slot] * cs);
    const sim::Vec2<double> to = waypoint_ - nav.est_pose.position;
    target_heading_ = std::atan2(to.y(), to.x());
  }
  phase_ = Phase::Turning;
  out.wheels = move_on(nav, model, dt).wheels;
  return out;
}

CoverageDriver::Step CoverageDriver::step(const nav::NavState& nav,
                                          const sim::UltrasonicSweep& sweep,
                                          const nav::NavParams& nav_params,
                                          const sim::RobotModel& model, double dt) {
  if (phase_ == Phase::Sweep) {
    Step out;
    out.sweep_only = true;
    phase_ = Phase::Idle;
    return out;
  }
  if (phase_ != Phase::Idle) {
    Step out = move_on(nav, model, dt);
    if (phase_ != Phase::Idle) return out;
  }
  // Engaged away from a center (after manual driving): go to this cell's center first.
  const sim::Vec2<double> center = cell_center_of(nav.est_pose.position, nav_params.cell_size);
  const sim::Vec2<double> to = center - nav.est_pose.position;
  if (to.norm() > kCenterTolerance) {
    waypoint_ = center;
    target_heading_ = std::atan2(to.y(), to.x());
    phase_ = Phase::Turning;
    return move_on(nav, model, dt);
  }
  return decide(nav, sweep, nav_params, model, dt);
}

}  // namespace companion::control
