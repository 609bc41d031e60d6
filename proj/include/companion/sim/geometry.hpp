#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace companion::sim {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

// World frame: x grows east (map columns), y grows south (map rows), heading
// is measured from +x toward +y, i.e. clockwise as drawn on the map.
template <typename Scalar>
struct Pose2 {
  Vec2<Scalar> position = Vec2<Scalar>::Zero();
  Scalar theta{0};

  bool operator==(const Pose2&) const = default;
};

using Pose = Pose2<double>;

/// Wraps an angle into [-pi, pi).
template <typename Scalar>
Scalar normalize_angle(Scalar angle) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  if (angle >= -pi && angle < pi) return angle;
  Scalar wrapped = std::fmod(angle + pi, two_pi);
  if (wrapped < 0) wrapped += two_pi;
  if (wrapped >= two_pi) wrapped -= two_pi;
  Scalar out = wrapped - pi;
  return out < pi ? out : -pi;
}

template <typename Scalar>
Vec2<Scalar> heading_vector(Scalar angle) {
  return Vec2<Scalar>(std::cos(angle), std::sin(angle));
}

/// sin(x)/x, stable around zero.
template <typename Scalar>
Scalar sinc(Scalar x) {
  if (std::abs(x) < Scalar(1e-4)) return Scalar(1) - x * x / Scalar(6);
  return std::sin(x) / x;
}

/// Exact differential-drive arc update from per-wheel arc lengths.
///
/// A left wheel travelling farther than the right one turns the robot toward
/// +theta. The chord form keeps the update well conditioned as the curvature
/// goes to zero; `straight` forces the zero-curvature branch.
template <typename Scalar>
Pose2<Scalar> advance_arc(const Pose2<Scalar>& pose, Scalar left_arc,
                          Scalar right_arc, Scalar wheel_base,
                          bool straight = false) {
  const Scalar ds = (left_arc + right_arc) / Scalar(2);
  const Scalar dtheta = straight ? Scalar(0) : (left_arc - right_arc) / wheel_base;
  const Scalar chord = ds * sinc(dtheta / Scalar(2));
  Pose2<Scalar> out;
  out.position = pose.position + chord * heading_vector(pose.theta + dtheta / Scalar(2));
  out.theta = normalize_angle(pose.theta + dtheta);
  return out;
}

/// Shortest signed rotation taking `from` onto `to`.
template <typename Scalar>
Scalar angle_difference(Scalar to, Scalar from) {
  return normalize_angle(to - from);
}

}  // namespace companion::sim
