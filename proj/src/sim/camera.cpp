#include "companion/sim/camera.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "companion/sim/raycast.hpp"

namespace companion::sim {

CameraState apply_camera_pan(CameraState cam, PanDirection dir) {
  switch (dir) {
    case PanDirection::Left:
      cam.pan_step = std::max(cam.pan_step - 1, -kMaxPanSteps);
      break;
    case PanDirection::Right:
      cam.pan_step = std::min(cam.pan_step + 1, kMaxPanSteps);
      break;
    case PanDirection::Up:
      cam.tilt_step = std::min(cam.tilt_step + 1, kMaxTiltSteps);
      break;
    case PanDirection::Down:
      cam.tilt_step = std::max(cam.tilt_step - 1, -kMaxTiltSteps);
      break;
  }
  return cam;
}

namespace {

Pixel classify(const OccupancyGrid& grid, const Vec2<double>& eye, const Vec2<double>& target) {
  const CellIndex cell = grid.cell_of(target);
  if (!grid.contains(cell)) return Pixel::Unknown;

  const Vec2<double> offset = target - eye;
  const double range = offset.norm();
  const Vec2<double> dir = offset / range;
  const double angle = std::atan2(offset.y(), offset.x());
  const auto hit = cast_ray(grid, eye, angle, range + 2.0 * grid.cell_size());

  if (grid.at(cell) == Cell::Free) {
    return !hit || hit->distance >= range ? Pixel::Free : Pixel::Unknown;
  }
  const Vec2<double> lo = grid.cell_min(cell);
  const auto entry = ray_box_entry(eye, dir, lo, lo + Vec2<double>::Constant(grid.cell_size()));
  if (hit && entry && hit->distance >= *entry - 1e-9) return Pixel::Obstacle;
  return Pixel::Unknown;
}

}  // namespace

CameraFrame render_frame(const World& world, const CameraState& cam, std::uint64_t seq,
                         double timestamp, int width, int height) {
  if (width <= 0 || height <= 0 || width % 2 == 0) {
    throw std::invalid_argument("render_frame: width must be odd and positive");
  }
  CameraFrame frame;
  frame.seq = seq;
  frame.timestamp = timestamp;
  frame.camera = cam;
  frame.pixels.resize(height, width);

  const OccupancyGrid& grid = world.grid;
  const double s = grid.cell_size();
  const Vec2<double> eye = world.true_pose.position;
  const double axis = world.true_pose.theta + cam.pan_offset();
  const Vec2<double> forward = heading_vector(axis);
  const Vec2<double> right = heading_vector(axis + std::numbers::pi / 2.0);
  const int centre_col = width / 2;

  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const int ahead = height - 1 - row;
      const int lateral = col - centre_col;
      if (ahead == 0 && lateral == 0) {
        frame.pixels(row, col) = Pixel::Robot;
        continue;
      }
      const Vec2<double> target = eye + forward * (ahead * s) + right * (lateral * s);
      frame.pixels(row, col) = classify(grid, eye, target);
    }
  }
  return frame;
}

std::vector<PixelRun> encode_runs(const CameraFrame::Pixels& pixels) {
  std::vector<PixelRun> runs;
  const Pixel* data = pixels.data();
  const auto n = pixels.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!runs.empty() && runs.back().code == data[i]) {
      ++runs.back().count;
    } else {
      runs.push_back({data[i], 1});
    }
  }
  return runs;
}

CameraFrame::Pixels decode_runs(const std::vector<PixelRun>& runs, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("decode_runs: bad dimensions");
  const std::uint64_t total = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  CameraFrame::Pixels pixels(height, width);
  std::uint64_t filled = 0;
  for (const PixelRun& run : runs) {
    if (run.count == 0 || filled + run.count > total) {
      throw std::invalid_argument("decode_runs: runs do not match frame size");
    }
    if (static_cast<int>(run.code) > static_cast<int>(Pixel::Robot)) {
      throw std::invalid_argument("decode_runs: unknown pixel code");
    }
    std::fill_n(pixels.data() + filled, run.count, run.code);
    filled += run.count;
  }
  if (filled != total) throw std::invalid_argument("decode_runs: runs do not match frame size");
  return pixels;
}

}  // namespace companion::sim
