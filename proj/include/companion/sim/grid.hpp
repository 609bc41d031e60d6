#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "companion/sim/geometry.hpp"

namespace companion::sim {

enum class Cell : std::uint8_t { Free = 0, Obstacle = 1 };

struct CellIndex {
  int ix = 0;
  int iy = 0;

  bool operator==(const CellIndex&) const = default;
};

// Rectangular occupancy grid. Cell (ix, iy) covers
// [ix*s, (ix+1)*s) x [iy*s, (iy+1)*s); iy = 0 is the first map row.
class OccupancyGrid {
 public:
  using Storage = Eigen::Array<Cell, Eigen::Dynamic, Eigen::Dynamic>;

  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double cell_size, Cell fill = Cell::Free);

  int width() const { return static_cast<int>(cells_.rows()); }
  int height() const { return static_cast<int>(cells_.cols()); }
  double cell_size() const { return cell_size_; }

  bool contains(CellIndex c) const {
    return c.ix >= 0 && c.iy >= 0 && c.ix < width() && c.iy < height();
  }
  Cell at(CellIndex c) const { return cells_(c.ix, c.iy); }
  void set(CellIndex c, Cell v) { cells_(c.ix, c.iy) = v; }

  /// Out-of-bounds reads as obstacle: the world is closed.
  bool blocked(CellIndex c) const { return !contains(c) || at(c) == Cell::Obstacle; }

  CellIndex cell_of(const Vec2<double>& p) const;
  Vec2<double> cell_center(CellIndex c) const;
  Vec2<double> cell_min(CellIndex c) const;

  int count(Cell v) const;
  const Storage& cells() const { return cells_; }

  bool operator==(const OccupancyGrid&) const;

 private:
  Storage cells_;
  double cell_size_ = 0.10;
};

/// Euclidean distance from `p` to the closed square of cell `c`.
double distance_to_cell(const OccupancyGrid& grid, const Vec2<double>& p, CellIndex c);

/// Whether a disc intersects (strictly overlaps) any obstacle cell.
bool disc_hits_obstacle(const OccupancyGrid& grid, const Vec2<double>& center, double radius);

/// Smallest distance from `p` to any obstacle cell within `search_radius`;
/// nullopt when none is that close.
std::optional<double> nearest_obstacle(const OccupancyGrid& grid, const Vec2<double>& p,
                                       double search_radius);

}  // namespace companion::sim
