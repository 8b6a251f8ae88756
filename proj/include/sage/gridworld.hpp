#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "sage/grid.hpp"

namespace sage::gridworld {

/// Exact distance transform of a grid. Distances are kept as integer squared
/// cell distances so threshold tests (d >= delta) are exact; conversion to
/// meters happens only at the accessor boundary.
class DistanceField {
 public:
  DistanceField() = default;
  DistanceField(Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> squared,
                double resolution, bool has_obstacle)
      : squared_(std::move(squared)), resolution_(resolution), has_obstacle_(has_obstacle) {}

  int width() const { return static_cast<int>(squared_.cols()); }
  int height() const { return static_cast<int>(squared_.rows()); }
  bool has_obstacle() const { return has_obstacle_; }

  /// Squared distance in cell units; meaningless when has_obstacle() is false.
  std::int64_t squared_cells(int x, int y) const { return squared_(y, x); }
  std::int64_t squared_cells(Cell c) const { return squared_(c.y, c.x); }

  double cells(Cell c) const {
    if (!has_obstacle_) return std::numeric_limits<double>::infinity();
    return std::sqrt(static_cast<double>(squared_(c.y, c.x)));
  }

  double meters(Cell c) const {
    if (!has_obstacle_) return std::numeric_limits<double>::infinity();
    return cells(c) * resolution_;
  }

 private:
  Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> squared_;
  double resolution_ = 0.1;
  bool has_obstacle_ = false;
};

/// Exact Euclidean distance transform (two-pass lower-envelope scan, integer
/// arithmetic throughout). Unknown cells count as traversable, not obstacles.
DistanceField compute_distance_field(const OccupancyGrid& grid);

/// Free cells whose clearance is at least `delta_cells` (cell units).
/// Returned sorted by (y, x). delta may be +infinity.
std::vector<Cell> safe_space(const OccupancyGrid& grid, const DistanceField& field,
                             double delta_cells);

/// Cells visible from `pose` within `range_m` and an angular cone of
/// half-width hfov/2 around pose.theta. A ray is marched from the pose to
/// each candidate cell center in steps of resolution/2; Obstacle and Unknown
/// cells block the ray, and the blocking cell itself is visible.
/// The pose's own cell is always in the result. Sorted by (y, x).
std::vector<Cell> visible_cells(const OccupancyGrid& grid, const Pose& pose,
                                double hfov, double range_m);

/// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

/// View offsets of the simulated three-camera rig: forward, left, right.
inline constexpr double kThreeViewOffsets[3] = {0.0, 2.0 * M_PI / 3.0, -2.0 * M_PI / 3.0};

/// Defaults mirrored from the sensor configuration.
inline constexpr double kDefaultHfov = 2.0 * M_PI / 3.0;  // 120 degrees
inline constexpr double kDefaultRange = 1.7;              // meters
inline constexpr double kDefaultSafetyDelta = 5.0;        // cells

}  // namespace sage::gridworld
