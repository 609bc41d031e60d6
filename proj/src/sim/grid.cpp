#include "companion/sim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace companion::sim {

OccupancyGrid::OccupancyGrid(int width, int height, double cell_size, Cell fill)
    : cells_(Storage::Constant(width, height, fill)), cell_size_(cell_size) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("OccupancyGrid: empty grid");
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("OccupancyGrid: cell size must be positive");
  }
}

CellIndex OccupancyGrid::cell_of(const Vec2<double>& p) const {
  return {static_cast<int>(std::floor(p.x() / cell_size_)),
          static_cast<int>(std::floor(p.y() / cell_size_))};
}

Vec2<double> OccupancyGrid::cell_center(CellIndex c) const {
  return {(c.ix + 0.5) * cell_size_, (c.iy + 0.5) * cell_size_};
}

Vec2<double> OccupancyGrid::cell_min(CellIndex c) const {
  return {c.ix * cell_size_, c.iy * cell_size_};
}

int OccupancyGrid::count(Cell v) const {
  return static_cast<int>((cells_ == v).count());
}

bool OccupancyGrid::operator==(const OccupancyGrid& other) const {
  return cell_size_ == other.cell_size_ && cells_.rows() == other.cells_.rows() &&
         cells_.cols() == other.cells_.cols() && (cells_ == other.cells_).all();
}

double distance_to_cell(const OccupancyGrid& grid, const Vec2<double>& p, CellIndex c) {
  const Vec2<double> lo = grid.cell_min(c);
  const Vec2<double> hi = lo + Vec2<double>::Constant(grid.cell_size());
  const Vec2<double> nearest = p.cwiseMax(lo).cwiseMin(hi);
  return (p - nearest).norm();
}

namespace {

template <typename Fn>
void for_cells_near(const OccupancyGrid& grid, const Vec2<double>& p, double radius, Fn&& fn) {
  const CellIndex lo = grid.cell_of(p - Vec2<double>::Constant(radius));
  const CellIndex hi = grid.cell_of(p + Vec2<double>::Constant(radius));
  for (int iy = lo.iy; iy <= hi.iy; ++iy) {
    for (int ix = lo.ix; ix <= hi.ix; ++ix) {
      fn(CellIndex{ix, iy});
    }
  }
}

}  // namespace

bool disc_hits_obstacle(const OccupancyGrid& grid, const Vec2<double>& center, double radius) {
  bool hit = false;
  for_cells_near(grid, center, radius, [&](CellIndex c) {
    if (!hit && grid.blocked(c) && distance_to_cell(grid, center, c) < radius) hit = true;
  });
  return hit;
}

std::optional<double> nearest_obstacle(const OccupancyGrid& grid, const Vec2<double>& p,
                                       double search_radius) {
  std::optional<double> best;
  for_cells_near(grid, p, search_radius, [&](CellIndex c) {
    if (!grid.blocked(c)) return;
    const double d = distance_to_cell(grid, p, c);
    if (d <= search_radius && (!best || d < *best)) best = d;
  });
  return best;
}

}  // namespace companion::sim
