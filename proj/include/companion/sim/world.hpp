#pragma once

#include <array>
#include <cstdint>
#include <numbers>

#include "companion/sim/acoustics.hpp"
#include "companion/sim/geometry.hpp"
#include "companion/sim/grid.hpp"

namespace companion::sim {

inline constexpr int kSensorCount = 6;

// Sensor slots, in index order.
enum class SensorSlot : int { Front = 0, FrontLeft = 1, FrontRight = 2, Left = 3, Right = 4, Rear = 5 };

struct UltrasonicSpec {
  double bearing = 0.0;  // radians relative to heading
  double frequency_khz = 40.0;
  double max_range_m = 4.0;
};

struct RobotModel {
  double wheel_radius = 0.032;
  double wheel_base = 0.14;
  int ticks_per_rev = 360;
  double max_wheel_rpm = 500.0;
  double body_radius = 0.11;
  std::array<UltrasonicSpec, kSensorCount> sensors;

  /// Six HC-SR04 style sensors at 0, -45, +45, -90, +90 and 180 degrees
  /// (negative is to the robot's left), ranges looked up from `table`.
  static RobotModel make_default(const RangeTable& table = RangeTable{},
                                 double frequency_khz = 40.0);

  double max_wheel_speed() const { return max_wheel_rpm * 2.0 * std::numbers::pi / 60.0; }
  /// Wheel rotation (rad) represented by one encoder tick.
  double radians_per_tick() const { return 2.0 * std::numbers::pi / ticks_per_rev; }
  double metres_per_tick() const { return radians_per_tick() * wheel_radius; }

  /// Throws std::invalid_argument when geometry or sensor layout is unusable.
  void validate() const;
};

// Fractional encoder state carried between drive steps.
struct EncoderState {
  double left_exact = 0.0;  // accumulated rotation in ticks
  double right_exact = 0.0;
  std::int64_t left_reported = 0;
  std::int64_t right_reported = 0;

  bool operator==(const EncoderState&) const = default;
};

struct BatteryInfo {
  double voltage = 7.4;
  double capacity_mah = 4000.0;

  bool operator==(const BatteryInfo&) const = default;
};

struct World {
  OccupancyGrid grid;
  double ambient_temp_c = 20.0;
  Pose true_pose;
  std::uint64_t rng_seed = 0;
  EncoderState encoders;
  BatteryInfo battery;

  double cell_size() const { return grid.cell_size(); }

  bool operator==(const World&) const = default;
};

}  // namespace companion::sim
