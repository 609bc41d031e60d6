#pragma once

#include <limits>
#include <optional>

#include "companion/sim/grid.hpp"

namespace companion::sim {

struct RayHit {
  double distance = 0.0;
  CellIndex cell;
};

/// Walks the grid cell by cell (exact ray/grid-line intersections) from
/// `origin` along `angle` and returns the first obstacle cell boundary hit
/// within `max_distance`. Cells are closed: a ray passing exactly through a
/// grid vertex hits any obstacle touching that vertex.
std::optional<RayHit> cast_ray(const OccupancyGrid& grid, const Vec2<double>& origin,
                               double angle,
                               double max_distance = std::numeric_limits<double>::infinity());

}  // namespace companion::sim

namespace companion::sim {

/// Parametric distance at which a ray enters the closed box [lo, hi], or
/// nullopt if it misses. `dir` must be unit length.
std::optional<double> ray_box_entry(const Vec2<double>& origin, const Vec2<double>& dir,
                                    const Vec2<double>& lo, const Vec2<double>& hi);

}  // namespace companion::sim
