#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "companion/sim/drive.hpp"
#include "companion/sim/ultrasonic.hpp"
#include "companion/sim/world.hpp"

namespace companion::nav {

using sim::CellIndex;
using sim::Pose;

enum class Action { Forward, TurnLeft45, TurnRight45, TurnLeft90, TurnRight90, Rotate180, Halt };
enum class Reason { Clear, Avoid, Coverage, Blocked };

std::string_view to_string(Action a);
std::string_view to_string(Reason r);
std::optional<Action> action_from_string(std::string_view s);
std::optional<Reason> reason_from_string(std::string_view s);

/// Heading change requested by an action (positive turns right).
double action_heading_delta(Action a);

struct MotionDecision {
  Action action = Action::Halt;
  Reason reason = Reason::Clear;

  bool operator==(const MotionDecision&) const = default;
};

struct NavParams {
  double clear_threshold = 0.30;  // metres; readings strictly below are blocked
  double cell_size = 0.10;
};

struct ClearanceSet {
  std::array<bool, sim::kSensorCount> clear{};
  double clear_threshold = 0.30;

  bool is_clear(sim::SensorSlot slot) const { return clear[static_cast<int>(slot)]; }
  bool operator==(const ClearanceSet&) const = default;
};

/// Per-bearing clear/blocked flags. Exactly one reading per sensor index is
/// required; anything else throws std::invalid_argument.
ClearanceSet classify_clearance(std::span<const sim::UltrasonicReading> readings,
                                const NavParams& params);

/// Dead reckoning: per-wheel arc = ticks / ticks_per_rev * 2 pi * radius,
/// followed by the exact arc update.
Pose integrate_odometry(const Pose& est, const sim::EncoderDelta& delta,
                        const sim::RobotModel& model);

using VisitGrid = Eigen::Array<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic>;

struct NavState {
  Pose est_pose;
  VisitGrid visits;                   // (ix, iy), same shape as the world grid
  std::optional<CellIndex> last_cell;  // cell most recently marked
  MotionDecision current_intent;
  bool drifted = false;               // last mark had to clamp est_pose into the grid

  static NavState fresh(int width, int height, const Pose& start);

  int width() const { return static_cast<int>(visits.rows()); }
  int height() const { return static_cast<int>(visits.cols()); }
  std::uint32_t visits_at(CellIndex c) const { return visits(c.ix, c.iy); }
};

/// Counts one visit when est_pose has entered a cell other than the one last
/// marked. Poses outside the grid clamp to the nearest cell and set drifted.
NavState mark_visited(NavState nav, double cell_size);

/// Least-visited greedy choice among the clear candidates {forward, +-45,
/// +-90}, scored by the visit count one cell ahead along each candidate
/// heading. Ties resolve in candidate order; nothing clear means rotate 180.
MotionDecision choose_heading(const NavState& nav, const ClearanceSet& clearance,
                              const NavParams& params);

struct CoverageStats {
  int visited_free = 0;
  int free = 0;
  std::uint32_t max_visits = 0;

  double fraction() const { return free == 0 ? 0.0 : static_cast<double>(visited_free) / free; }
};

CoverageStats coverage(const NavState& nav, const sim::OccupancyGrid& grid);

}  // namespace companion::nav
