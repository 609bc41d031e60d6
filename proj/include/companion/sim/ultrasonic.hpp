#pragma once

#include <array>
#include <optional>

#include "companion/sim/world.hpp"

namespace companion::sim {

// An empty distance means no echo within the sensor's range.
struct UltrasonicReading {
  int sensor_index = 0;
  std::optional<double> distance_m;
  std::optional<double> time_of_flight_s;

  bool has_echo() const { return distance_m.has_value(); }
  bool operator==(const UltrasonicReading&) const = default;
};

using UltrasonicSweep = std::array<UltrasonicReading, kSensorCount>;

/// Single-ray reading from the robot centre along heading + bearing.
UltrasonicReading sense_ultrasonic(const World& world, const RobotModel& model, int index);

UltrasonicSweep sense_all(const World& world, const RobotModel& model);

}  // namespace companion::sim
