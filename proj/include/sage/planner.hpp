#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sage/grid.hpp"
#include "sage/gridworld.hpp"

namespace sage::planner {

/// Grid-path length represented exactly as straight + diag * sqrt(2) step
/// counts. Comparisons are exact integer arithmetic, so shortest-path
/// equality checks never depend on floating-point summation order.
struct ExactLength {
  std::int64_t straight = 0;
  std::int64_t diag = 0;

  ExactLength operator+(const ExactLength& o) const { return {straight + o.straight, diag + o.diag}; }

  double cells() const { return static_cast<double>(straight) + std::sqrt(2.0) * static_cast<double>(diag); }
  double meters(double resolution) const { return cells() * resolution; }

  friend bool operator==(const ExactLength& a, const ExactLength& b) {
    return compare(a, b) == 0;
  }
  friend bool operator<(const ExactLength& a, const ExactLength& b) {
    return compare(a, b) < 0;
  }

  /// Sign of (a - b), i.e. of S + D*sqrt(2) with S, D integers. Exact:
  /// mixed-sign cases reduce to comparing S^2 against 2*D^2 (in 128-bit so
  /// sentinel-sized values cannot overflow), and sqrt(2) being irrational
  /// rules out nonzero ties.
  static int compare(const ExactLength& a, const ExactLength& b) {
    const std::int64_t s = a.straight - b.straight;
    const std::int64_t d = a.diag - b.diag;
    if (s == 0 && d == 0) return 0;
    if (s <= 0 && d <= 0) return -1;
    if (s >= 0 && d >= 0) return 1;
    const __int128 ss = static_cast<__int128>(s) * s;
    const __int128 dd = 2 * static_cast<__int128>(d) * d;
    if (s > 0) return ss > dd ? 1 : -1;  // d < 0
    return ss > dd ? -1 : 1;             // s < 0, d > 0
  }
};

/// 8-connected grid path. Headings follow the tangent toward the next
/// waypoint; the terminal waypoint inherits its predecessor's heading.
struct Trajectory {
  std::vector<Cell> cells;
  std::vector<Pose> waypoints;
  ExactLength exact;
  double length_m = 0.0;
};

/// One camera view attached to a keypoint. `object_ids` indexes into a
/// scene's object list and is filled in by the task-synthesis stage.
struct ViewDescriptor {
  double view_offset = 0.0;
  std::vector<Cell> cells;
  std::vector<int> object_ids;
};

/// Forward/left/right observations at a trajectory keypoint. The forward
/// view is the ground-truth action for the step.
struct ObservationTriplet {
  int keypoint_order = 0;
  int waypoint_index = 0;
  Pose pose;
  ViewDescriptor forward;
  ViewDescriptor left;
  ViewDescriptor right;
};

struct StartOrGoalUnsafe : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct EmptySafeSpace : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct TrajectoryTooShort : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NoPath : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimum-metric-length path between start and goal through `safe` under
/// 8-connectivity with the octile heuristic. Ties broken by (f, h, cell
/// index) so paths are reproducible. nullopt when disconnected.
std::optional<Trajectory> astar(const OccupancyGrid& grid, const std::vector<Cell>& safe,
                                Cell start, Cell goal);

struct EndpointSample {
  enum class Status { Accepted, NoPathFound, TooLong };
  Status status = Status::Accepted;
  Cell start{};
  Cell goal{};
  std::optional<Trajectory> trajectory;

  bool accepted() const { return status == Status::Accepted; }
};

/// Uniformly samples a (start, goal) pair from the safe set and plans between
/// them; the sample is rejected when no path exists or the path is not
/// shorter than `max_length_m`.
EndpointSample sample_task_endpoints(const OccupancyGrid& grid, const std::vector<Cell>& safe,
                                     std::uint64_t rng_seed, double max_length_m = 20.0);

/// Discretizes a trajectory into T keypoints (2 <= T < 10, endpoints always
/// kept, interior indices sampled without replacement) and renders the
/// three-view observations at each keypoint.
std::vector<ObservationTriplet> discretize(const OccupancyGrid& grid, const Trajectory& traj,
                                           std::uint64_t rng_seed,
                                           double hfov = gridworld::kDefaultHfov,
                                           double range_m = gridworld::kDefaultRange);

struct FollowResult {
  Pose pose;
  double traveled = 0.0;
  bool reached = false;
};

/// Advances from `from` along the shortest Free-cell path toward `target`,
/// stopping once cumulative travel reaches delta_max or the Euclidean
/// distance to the target center drops to `proximity`, whichever happens
/// first. Travel never exceeds delta_max + resolution.
FollowResult follow(const OccupancyGrid& grid, const Pose& from, Cell target,
                    double delta_max = 1.0, double proximity = 0.5);

/// Geodesic distance over Free cells in meters, or nullopt if disconnected.
std::optional<double> geodesic_distance(const OccupancyGrid& grid, Cell from, Cell to);

/// Single-source geodesic distances (meters) over Free cells to every cell;
/// +infinity where unreachable. Indexed by grid.index(cell).
std::vector<double> geodesic_field(const OccupancyGrid& grid, Cell from);

}  // namespace sage::planner
