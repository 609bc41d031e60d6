#include "companion/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace companion::sim {

RobotModel RobotModel::make_default(const RangeTable& table, double frequency_khz) {
  constexpr double deg = std::numbers::pi / 180.0;
  RobotModel model;
  const std::array<double, kSensorCount> bearings = {0.0,       -45.0 * deg, 45.0 * deg,
                                                     -90.0 * deg, 90.0 * deg, -180.0 * deg};
  for (int i = 0; i < kSensorCount; ++i) {
    model.sensors[i] = {bearings[i], frequency_khz, table.max_range(frequency_khz)};
  }
  return model;
}

void RobotModel::validate() const {
  if (!(wheel_radius > 0 && wheel_base > 0 && body_radius > 0 && max_wheel_rpm > 0)) {
    throw std::invalid_argument("RobotModel: geometry must be positive");
  }
  if (ticks_per_rev <= 0) throw std::invalid_argument("RobotModel: ticks_per_rev must be positive");
  for (int i = 0; i < kSensorCount; ++i) {
    if (!(sensors[i].max_range_m > 0)) {
      throw std::invalid_argument("RobotModel: sensor range must be positive");
    }
    for (int j = 0; j < i; ++j) {
      const double gap = std::abs(normalize_angle(sensors[i].bearing - sensors[j].bearing));
      if (gap < 1e-9) throw std::invalid_argument("RobotModel: duplicate sensor bearing");
    }
  }
}

}  // namespace companion::sim
