#include "companion/sim/ultrasonic.hpp"

#include <stdexcept>

#include "companion/sim/raycast.hpp"

namespace companion::sim {

UltrasonicReading sense_ultrasonic(const World& world, const RobotModel& model, int index) {
  if (index < 0 || index >= kSensorCount) {
    throw std::out_of_range("sense_ultrasonic: sensor index " + std::to_string(index));
  }
  const UltrasonicSpec& spec = model.sensors[index];
  UltrasonicReading reading;
  reading.sensor_index = index;
  const auto hit = cast_ray(world.grid, world.true_pose.position,
                            world.true_pose.theta + spec.bearing, spec.max_range_m);
  if (hit) {
    reading.distance_m = hit->distance;
    reading.time_of_flight_s = time_of_flight(hit->distance, world.ambient_temp_c);
  }
  return reading;
}

UltrasonicSweep sense_all(const World& world, const RobotModel& model) {
  UltrasonicSweep sweep;
  for (int i = 0; i < kSensorCount; ++i) sweep[i] = sense_ultrasonic(world, model, i);
  return sweep;
}

}  // namespace companion::sim
