#pragma once

#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "companion/sim/world.hpp"

namespace companion::sim {

enum class PanDirection { Left, Right, Up, Down };

inline constexpr int kMaxPanSteps = 3;  // 3 x 30 degrees = 90 degrees
inline constexpr int kMaxTiltSteps = 3;
inline constexpr double kPanStepRad = std::numbers::pi / 6.0;

struct CameraState {
  int pan_step = 0;   // multiples of 30 degrees, positive toward the robot's right
  int tilt_step = 0;  // recorded only

  double pan_offset() const { return pan_step * kPanStepRad; }
  bool operator==(const CameraState&) const = default;
};

/// Saturating 30 degree pan / single-step tilt.
CameraState apply_camera_pan(CameraState cam, PanDirection dir);

enum class Pixel : std::uint8_t { Free = 0, Obstacle = 1, Unknown = 2, Robot = 3 };

struct PixelRun {
  Pixel code = Pixel::Free;
  std::uint32_t count = 0;

  bool operator==(const PixelRun&) const = default;
};

// Egocentric symbolic frame. Row 0 is the far edge, the robot sits in the
// bottom row at the centre column, columns grow toward the view's right.
struct CameraFrame {
  using Pixels = Eigen::Array<Pixel, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::uint64_t seq = 0;
  double timestamp = 0.0;
  CameraState camera;
  Pixels pixels;

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
  int count(Pixel p) const { return static_cast<int>((pixels == p).count()); }

  bool operator==(const CameraFrame& o) const {
    return seq == o.seq && timestamp == o.timestamp && camera == o.camera &&
           pixels.rows() == o.pixels.rows() && pixels.cols() == o.pixels.cols() &&
           (pixels == o.pixels).all();
  }
};

inline constexpr int kFrameWidth = 21;
inline constexpr int kFrameHeight = 21;

/// Visibility-limited view along heading + pan. Each frame cell samples the
/// world at one cell pitch; a cell is visible when the ray from the robot
/// centre reaches it before any other obstacle.
CameraFrame render_frame(const World& world, const CameraState& cam, std::uint64_t seq,
                         double timestamp, int width = kFrameWidth, int height = kFrameHeight);

/// Row-major run-length encoding of the pixel matrix.
std::vector<PixelRun> encode_runs(const CameraFrame::Pixels& pixels);

/// Throws std::invalid_argument when the runs do not fill width x height
/// exactly.
CameraFrame::Pixels decode_runs(const std::vector<PixelRun>& runs, int width, int height);

}  // namespace companion::sim
