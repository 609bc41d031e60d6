#include "companion/sim/drive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace companion::sim {

namespace {

constexpr double kSampleSpacing = 1e-3;  // metres of centre travel between overlap checks

Pose pose_at(const Pose& start, double fraction, double left_arc, double right_arc,
             double wheel_base, bool straight) {
  return advance_arc(start, fraction * left_arc, fraction * right_arc, wheel_base, straight);
}

}  // namespace

DriveResult step_drive(World world, const RobotModel& model, WheelCommand cmd, double dt) {
  if (!(dt > 0.0 && dt <= kMaxDriveStep)) {
    throw std::invalid_argument("step_drive: dt must be in (0, 0.5]");
  }
  if (!std::isfinite(cmd.left) || !std::isfinite(cmd.right)) {
    throw std::invalid_argument("step_drive: non-finite wheel command");
  }

  DriveResult result;
  const double limit = model.max_wheel_speed();
  result.applied = {std::clamp(cmd.left, -limit, limit), std::clamp(cmd.right, -limit, limit)};
  result.clamped = result.applied != cmd;

  const bool straight = std::abs(result.applied.left - result.applied.right) < 1e-9;
  const double left_arc = result.applied.left * dt * model.wheel_radius;
  const double right_arc = result.applied.right * dt * model.wheel_radius;
  const double travel = std::abs(left_arc + right_arc) / 2.0;
  const Pose start = world.true_pose;

  double delivered = 1.0;
  const int samples = static_cast<int>(std::ceil(travel / kSampleSpacing));
  for (int k = 1; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    const Pose p = pose_at(start, s, left_arc, right_arc, model.wheel_base, straight);
    if (!disc_hits_obstacle(world.grid, p.position, model.body_radius)) continue;

    double lo = static_cast<double>(k - 1) / samples;
    double hi = s;
    while ((hi - lo) * travel > kContactTolerance / 2.0) {
      const double mid = 0.5 * (lo + hi);
      const Pose pm = pose_at(start, mid, left_arc, right_arc, model.wheel_base, straight);
      (disc_hits_obstacle(world.grid, pm.position, model.body_radius) ? hi : lo) = mid;
    }
    delivered = lo;
    result.collided = true;
    break;
  }

  world.true_pose = pose_at(start, delivered, left_arc, right_arc, model.wheel_base, straight);

  const double ticks_per_rad = 1.0 / model.radians_per_tick();
  EncoderState& enc = world.encoders;
  enc.left_exact += delivered * result.applied.left * dt * ticks_per_rad;
  enc.right_exact += delivered * result.applied.right * dt * ticks_per_rad;
  const auto left_total = static_cast<std::int64_t>(std::llround(enc.left_exact));
  const auto right_total = static_cast<std::int64_t>(std::llround(enc.right_exact));
  result.encoders = {left_total - enc.left_reported, right_total - enc.right_reported, dt};
  enc.left_reported = left_total;
  enc.right_reported = right_total;

  result.world = std::move(world);
  return result;
}

WheelCommand wheel_command_for_ticks(const RobotModel& model, std::int64_t left_ticks,
                                     std::int64_t right_ticks, double dt) {
  const double rad = model.radians_per_tick();
  return {static_cast<double>(left_ticks) * rad / dt, static_cast<double>(right_ticks) * rad / dt};
}

}  // namespace companion::sim
