#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sage {

/// Cell occupancy. Unknown appears only in navigation-phase maps; ground-truth
/// maps produced by the generator contain only Free/Obstacle.
enum class CellState : std::uint8_t { Free = 0, Obstacle = 1, Unknown = 2 };

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  // Row-major order, matching the scan order in which cell lists are built.
  friend std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

/// Agent pose in metric coordinates, theta in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// 2D occupancy grid with metric resolution (meters per cell).
/// Cell (x, y) has x in [0, width) as column and y in [0, height) as row;
/// file row 0 is y = 0. Cell centers sit at ((x+0.5)*res, (y+0.5)*res).
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution, CellState fill = CellState::Free)
      : width_(width), height_(height), resolution_(resolution),
        cells_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 2 || height < 2) throw std::invalid_argument("grid must be at least 2x2");
    if (resolution <= 0.0) throw std::invalid_argument("grid resolution must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }
  bool in_bounds(Cell c) const { return in_bounds(c.x, c.y); }

  CellState at(int x, int y) const { return cells_[index(x, y)]; }
  CellState at(Cell c) const { return at(c.x, c.y); }
  void set(int x, int y, CellState s) { cells_[index(x, y)] = s; }
  void set(Cell c, CellState s) { set(c.x, c.y, s); }

  bool is_free(Cell c) const { return in_bounds(c) && at(c) == CellState::Free; }
  bool is_obstacle(Cell c) const { return in_bounds(c) && at(c) == CellState::Obstacle; }

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
  std::size_t index(Cell c) const { return index(c.x, c.y); }

  std::size_t cell_count() const { return cells_.size(); }

  /// Metric center of a cell.
  Pose center(Cell c) const {
    return Pose{(c.x + 0.5) * resolution_, (c.y + 0.5) * resolution_, 0.0};
  }

  /// Cell containing a metric point (clamped to bounds).
  Cell cell_of(double mx, double my) const {
    int cx = static_cast<int>(mx / resolution_);
    int cy = static_cast<int>(my / resolution_);
    cx = cx < 0 ? 0 : (cx >= width_ ? width_ - 1 : cx);
    cy = cy < 0 ? 0 : (cy >= height_ ? height_ - 1 : cy);
    return Cell{cx, cy};
  }

  std::vector<Cell> free_cells() const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.1;
  std::vector<CellState> cells_;
};

/// Plain-text grid format: first line "W H RESOLUTION", then H rows of W
/// characters from {'.' Free, '#' Obstacle, '?' Unknown}. Ragged rows and
/// unknown characters are rejected.
OccupancyGrid load_grid(std::istream& in);
OccupancyGrid load_grid_file(const std::string& path);
void save_grid(const OccupancyGrid& grid, std::ostream& out);
void save_grid_file(const OccupancyGrid& grid, const std::string& path);

}  // namespace sage
