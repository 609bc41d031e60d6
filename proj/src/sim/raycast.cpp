#include "companion/sim/raycast.hpp"

#include <cmath>

namespace companion::sim {

std::optional<RayHit> cast_ray(const OccupancyGrid& grid, const Vec2<double>& origin,
                               double angle, double max_distance) {
  const double s = grid.cell_size();
  const Vec2<double> dir = heading_vector(angle);
  CellIndex cell = grid.cell_of(origin);
  if (grid.blocked(cell)) return RayHit{0.0, cell};

  constexpr double inf = std::numeric_limits<double>::infinity();
  const int step_x = dir.x() > 0 ? 1 : (dir.x() < 0 ? -1 : 0);
  const int step_y = dir.y() > 0 ? 1 : (dir.y() < 0 ? -1 : 0);

  // Distance along the ray to the next vertical / horizontal grid line.
  auto next_boundary = [&](double p, int c, int step, double d) {
    if (step == 0) return inf;
    const double edge = (step > 0 ? c + 1 : c) * s;
    return (edge - p) / d;
  };
  double t_x = next_boundary(origin.x(), cell.ix, step_x, dir.x());
  double t_y = next_boundary(origin.y(), cell.iy, step_y, dir.y());

  while (true) {
    const double t = std::min(t_x, t_y);
    if (t > max_distance) return std::nullopt;
    if (t_x == t_y) {
      // Through a vertex: both edge neighbours touch the ray there.
      const CellIndex side_x{cell.ix + step_x, cell.iy};
      const CellIndex side_y{cell.ix, cell.iy + step_y};
      if (grid.blocked(side_x)) return RayHit{t, side_x};
      if (grid.blocked(side_y)) return RayHit{t, side_y};
      cell = {cell.ix + step_x, cell.iy + step_y};
    } else if (t_x < t_y) {
      cell.ix += step_x;
    } else {
      cell.iy += step_y;
    }
    // Recomputed from the cell index so error does not accumulate.
    t_x = next_boundary(origin.x(), cell.ix, step_x, dir.x());
    t_y = next_boundary(origin.y(), cell.iy, step_y, dir.y());
    if (grid.blocked(cell)) return RayHit{t, cell};
  }
}

}  // namespace companion::sim

namespace companion::sim {

std::optional<double> ray_box_entry(const Vec2<double>& origin, const Vec2<double>& dir,
                                    const Vec2<double>& lo, const Vec2<double>& hi) {
  double t_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 2; ++a) {
    if (dir[a] == 0.0) {
      if (origin[a] < lo[a] || origin[a] > hi[a]) return std::nullopt;
      continue;
    }
    double t0 = (lo[a] - origin[a]) / dir[a];
    double t1 = (hi[a] - origin[a]) / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
  }
  if (t_min > t_max) return std::nullopt;
  return t_min;
}

}  // namespace companion::sim
