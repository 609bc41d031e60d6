#pragma once

#include <cstdint>

#include "companion/sim/world.hpp"

namespace companion::sim {

struct WheelCommand {
  double left = 0.0;  // rad/s
  double right = 0.0;

  bool operator==(const WheelCommand&) const = default;
};

struct EncoderDelta {
  std::int64_t left_ticks = 0;
  std::int64_t right_ticks = 0;
  double dt = 0.0;

  bool operator==(const EncoderDelta&) const = default;
};

struct DriveResult {
  World world;
  EncoderDelta encoders;
  WheelCommand applied;  // after clamping
  bool collided = false;
  bool clamped = false;
};

inline constexpr double kMaxDriveStep = 0.5;
inline constexpr double kContactTolerance = 1e-4;

/// Advances the robot along the exact differential-drive arc for `dt`
/// seconds. Wheel speeds beyond the motor limit are clamped. If the body disc
/// would overlap an obstacle, motion stops at first contact (bisected to
/// kContactTolerance along the path) and only the rotation actually delivered
/// reaches the encoders. Throws std::invalid_argument unless dt is in (0, 0.5].
DriveResult step_drive(World world, const RobotModel& model, WheelCommand cmd, double dt);

/// Wheel command that turns each wheel by a whole number of encoder ticks
/// over `dt`.
WheelCommand wheel_command_for_ticks(const RobotModel& model, std::int64_t left_ticks,
                                     std::int64_t right_ticks, double dt);

}  // namespace companion::sim
