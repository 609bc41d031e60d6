#include "companion/nav/nav.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace companion::nav {

namespace {

constexpr std::array<std::pair<Action, std::string_view>, 7> kActionNames{{
    {Action::Forward, "FORWARD"},
    {Action::TurnLeft45, "TURN_LEFT_45"},
    {Action::TurnRight45, "TURN_RIGHT_45"},
    {Action::TurnLeft90, "TURN_LEFT_90"},
    {Action::TurnRight90, "TURN_RIGHT_90"},
    {Action::Rotate180, "ROTATE_180"},
    {Action::Halt, "HALT"},
}};

constexpr std::array<std::pair<Reason, std::string_view>, 4> kReasonNames{{
    {Reason::Clear, "CLEAR"},
    {Reason::Avoid, "AVOID"},
    {Reason::Coverage, "COVERAGE"},
    {Reason::Blocked, "BLOCKED"},
}};

// Candidate actions in tie-break order, with the sensor covering each.
struct Candidate {
  Action action;
  sim::SensorSlot sensor;
};
constexpr std::array<Candidate, 5> kCandidates{{
    {Action::Forward, sim::SensorSlot::Front},
    {Action::TurnLeft45, sim::SensorSlot::FrontLeft},
    {Action::TurnRight45, sim::SensorSlot::FrontRight},
    {Action::TurnLeft90, sim::SensorSlot::Left},
    {Action::TurnRight90, sim::SensorSlot::Right},
}};

}  // namespace

std::string_view to_string(Action a) {
  for (const auto& [k, v] : kActionNames) {
    if (k == a) return v;
  }
  return "HALT";
}

std::string_view to_string(Reason r) {
  for (const auto& [k, v] : kReasonNames) {
    if (k == r) return v;
  }
  return "CLEAR";
}

std::optional<Action> action_from_string(std::string_view s) {
  for (const auto& [k, v] : kActionNames) {
    if (v == s) return k;
  }
  return std::nullopt;
}

std::optional<Reason> reason_from_string(std::string_view s) {
  for (const auto& [k, v] : kReasonNames) {
    if (v == s) return k;
  }
  return std::nullopt;
}

double action_heading_delta(Action a) {
  constexpr double q = std::numbers::pi / 4.0;
  switch (a) {
    case Action::TurnLeft45: return -q;
    case Action::TurnRight45: return q;
    case Action::TurnLeft90: return -2 * q;
    case Action::TurnRight90: return 2 * q;
    case Action::Rotate180: return 4 * q;
    case Action::Forward:
    case Action::Halt: return 0.0;
  }
  return 0.0;
}

ClearanceSet classify_clearance(std::span<const sim::UltrasonicReading> readings,
                                const NavParams& params) {
  if (readings.size() != sim::kSensorCount) {
    throw std::invalid_argument("classify_clearance: expected 6 readings, got " +
                                std::to_string(readings.size()));
  }
  ClearanceSet set;
  set.clear_threshold = params.clear_threshold;
  std::array<bool, sim::kSensorCount> seen{};
  for (const auto& r : readings) {
    if (r.sensor_index < 0 || r.sensor_index >= sim::kSensorCount || seen[r.sensor_index]) {
      throw std::invalid_argument("classify_clearance: missing or duplicate sensor index");
    }
    seen[r.sensor_index] = true;
    set.clear[r.sensor_index] = !r.distance_m || *r.distance_m >= params.clear_threshold;
  }
  return set;
}

Pose integrate_odometry(const Pose& est, const sim::EncoderDelta& delta,
                        const sim::RobotModel& model) {
  if (delta.left_ticks == 0 && delta.right_ticks == 0) return est;
  const double per_tick = model.metres_per_tick();
  return sim::advance_arc(est, static_cast<double>(delta.left_ticks) * per_tick,
                          static_cast<double>(delta.right_ticks) * per_tick, model.wheel_base,
                          delta.left_ticks == delta.right_ticks);
}

NavState NavState::fresh(int width, int height, const Pose& start) {
  NavState nav;
  nav.est_pose = start;
  nav.visits = VisitGrid::Zero(width, height);
  return nav;
}

NavState mark_visited(NavState nav, double cell_size) {
  const auto& p = nav.est_pose.position;
  CellIndex cell{static_cast<int>(std::floor(p.x() / cell_size)),
                 static_cast<int>(std::floor(p.y() / cell_size))};
  const CellIndex clamped{std::clamp(cell.ix, 0, nav.width() - 1),
                          std::clamp(cell.iy, 0, nav.height() - 1)};
  nav.drifted = !(clamped == cell);
  if (nav.last_cell && *nav.last_cell == clamped) return nav;
  ++nav.visits(clamped.ix, clamped.iy);
  nav.last_cell = clamped;
  return nav;
}

MotionDecision choose_heading(const NavState& nav, const ClearanceSet& clearance,
                              const NavParams& params) {
  constexpr auto kUnreachable = std::numeric_limits<std::uint64_t>::max();
  std::optional<Action> best;
  std::uint64_t best_score = kUnreachable;

  for (const Candidate& c : kCandidates) {
    if (!clearance.is_clear(c.sensor)) continue;
    const double heading = nav.est_pose.theta + action_heading_delta(c.action);
    const sim::Vec2<double> ahead =
        nav.est_pose.position + params.cell_size * sim::heading_vector(heading);
    const CellIndex cell{static_cast<int>(std::floor(ahead.x() / params.cell_size)),
                         static_cast<int>(std::floor(ahead.y() / params.cell_size))};
    const bool inside = cell.ix >= 0 && cell.iy >= 0 && cell.ix < nav.width() &&
                        cell.iy < nav.height();
    const std::uint64_t score = inside ? nav.visits(cell.ix, cell.iy) : kUnreachable - 1;
    if (!best || score < best_score) {
      best = c.action;
      best_score = score;
    }
  }

  if (!best) return {Action::Rotate180, Reason::Blocked};
  if (*best == Action::Forward) return {Action::Forward, Reason::Clear};
  const bool forward_clear = clearance.is_clear(sim::SensorSlot::Front);
  return {*best, forward_clear ? Reason::Coverage : Reason::Avoid};
}

CoverageStats coverage(const NavState& nav, const sim::OccupancyGrid& grid) {
  CoverageStats stats;
  for (int iy = 0; iy < grid.height(); ++iy) {
    for (int ix = 0; ix < grid.width(); ++ix) {
      const std::uint32_t v = nav.visits(ix, iy);
      stats.max_visits = std::max(stats.max_visits, v);
      if (grid.at({ix, iy}) != sim::Cell::Free) continue;
      ++stats.free;
      if (v > 0) ++stats.visited_free;
    }
  }
  return stats;
}

}  // namespace companion::nav
