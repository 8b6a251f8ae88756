#include "sage/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "sage/rng.hpp"

namespace sage::planner {

namespace {

constexpr int kDX[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDY[8] = {0, 0, 1, -1, 1, -1, 1, -1};

struct QueueEntry {
  ExactLength f;
  ExactLength h;
  std::size_t index;
  ExactLength g;  // snapshot for lazy deletion
};

struct QueueOrder {
  // Max-heap adapter: returns true when a is worse than b.
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    const int cf = ExactLength::compare(a.f, b.f);
    if (cf != 0) return cf > 0;
    const int ch = ExactLength::compare(a.h, b.h);
    if (ch != 0) return ch > 0;
    return a.index > b.index;
  }
};

ExactLength octile(Cell a, Cell b) {
  const std::int64_t dx = std::abs(a.x - b.x);
  const std::int64_t dy = std::abs(a.y - b.y);
  return {std::max(dx, dy) - std::min(dx, dy), std::min(dx, dy)};
}

Trajectory make_trajectory(const OccupancyGrid& grid, std::vector<Cell> cells, ExactLength total) {
  Trajectory traj;
  traj.cells = std::move(cells);
  traj.exact = total;
  traj.length_m = total.meters(grid.resolution());
  traj.waypoints.reserve(traj.cells.size());
  for (std::size_t i = 0; i < traj.cells.size(); ++i) {
    Pose p = grid.center(traj.cells[i]);
    if (i + 1 < traj.cells.size()) {
      const Cell next = traj.cells[i + 1];
      p.theta = std::atan2(static_cast<double>(next.y - traj.cells[i].y),
                           static_cast<double>(next.x - traj.cells[i].x));
    } else if (i > 0) {
      p.theta = traj.waypoints[i - 1].theta;  // terminal inherits predecessor
    }
    traj.waypoints.push_back(p);
  }
  return traj;
}

template <typename Passable>
std::optional<Trajectory> search(const OccupancyGrid& grid, Cell start, Cell goal,
                                 Passable passable) {
  const int w = grid.width();
  const int h = grid.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const ExactLength unreachable{std::numeric_limits<std::int64_t>::max() / 4, 0};

  std::vector<ExactLength> g(n, unreachable);
  std::vector<std::int32_t> parent(n, -1);
  std::vector<char> closed(n, 0);

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> open;
  const std::size_t start_idx = grid.index(start);
  const std::size_t goal_idx = grid.index(goal);
  g[start_idx] = {0, 0};
  open.push({octile(start, goal), octile(start, goal), start_idx, {0, 0}});

  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    if (ExactLength::compare(top.g, g[top.index]) != 0) continue;  // stale
    closed[top.index] = 1;
    if (top.index == goal_idx) break;

    const Cell cur{static_cast<int>(top.index % w), static_cast<int>(top.index / w)};
    for (int k = 0; k < 8; ++k) {
      const Cell nb{cur.x + kDX[k], cur.y + kDY[k]};
      if (!grid.in_bounds(nb)) continue;
      const std::size_t nb_idx = grid.index(nb);
      if (closed[nb_idx] || !passable(nb)) continue;
      const ExactLength step = k < 4 ? ExactLength{1, 0} : ExactLength{0, 1};
      const ExactLength cand = g[top.index] + step;
      if (ExactLength::compare(cand, g[nb_idx]) < 0) {
        g[nb_idx] = cand;
        parent[nb_idx] = static_cast<std::int32_t>(top.index);
        const ExactLength hh = octile(nb, goal);
        open.push({cand + hh, hh, nb_idx, cand});
      }
    }
  }

  if (!closed[goal_idx]) return std::nullopt;

  std::vector<Cell> cells;
  for (std::int64_t i = static_cast<std::int64_t>(goal_idx); i >= 0; i = parent[i]) {
    cells.push_back({static_cast<int>(i % w), static_cast<int>(i / w)});
    if (static_cast<std::size_t>(i) == start_idx) break;
  }
  std::reverse(cells.begin(), cells.end());
  return make_trajectory(grid, std::move(cells), g[goal_idx]);
}

}  // namespace

std::optional<Trajectory> astar(const OccupancyGrid& grid, const std::vector<Cell>& safe,
                                Cell start, Cell goal) {
  std::vector<char> mask(grid.cell_count(), 0);
  for (Cell c : safe) mask[grid.index(c)] = 1;
  if (!grid.in_bounds(start) || !grid.in_bounds(goal) || !mask[grid.index(start)] ||
      !mask[grid.index(goal)])
    throw StartOrGoalUnsafe("astar: start or goal outside the safe space");
  return search(grid, start, goal, [&](Cell c) { return mask[grid.index(c)] != 0; });
}

EndpointSample sample_task_endpoints(const OccupancyGrid& grid, const std::vector<Cell>& safe,
                                     std::uint64_t rng_seed, double max_length_m) {
  if (safe.empty()) throw EmptySafeSpace("sample_task_endpoints: empty safe space");
  rng::SplitMix64 rng(rng_seed);
  EndpointSample out;
  out.start = safe[rng.uniform_index(safe.size())];
  out.goal = safe[rng.uniform_index(safe.size())];
  auto traj = astar(grid, safe, out.start, out.goal);
  if (!traj) {
    out.status = EndpointSample::Status::NoPathFound;
    return out;
  }
  if (traj->length_m >= max_length_m) {
    out.status = EndpointSample::Status::TooLong;
    return out;
  }
  out.status = EndpointSample::Status::Accepted;
  out.trajectory = std::move(traj);
  return out;
}

std::vector<ObservationTriplet> discretize(const OccupancyGrid& grid, const Trajectory& traj,
                                           std::uint64_t rng_seed, double hfov, double range_m) {
  const std::size_t n = traj.waypoints.size();
  if (n < 2) throw TrajectoryTooShort("discretize: trajectory needs at least 2 waypoints");

  rng::SplitMix64 rng(rng_seed);
  // 1..9 interior nodes requested, capped so total keypoints stay below 10.
  const std::size_t requested = 1 + static_cast<std::size_t>(rng.uniform_index(9));
  const std::size_t interior = std::min({requested, n - 2, static_cast<std::size_t>(7)});

  std::vector<std::size_t> indices{0};
  for (std::size_t i : rng.sample_without_replacement(n - 2, interior)) indices.push_back(i + 1);
  indices.push_back(n - 1);

  std::vector<ObservationTriplet> out;
  out.reserve(indices.size());
  for (std::size_t order = 0; order < indices.size(); ++order) {
    const std::size_t wi = indices[order];
    ObservationTriplet trip;
    trip.keypoint_order = static_cast<int>(order);
    trip.waypoint_index = static_cast<int>(wi);
    trip.pose = traj.waypoints[wi];
    ViewDescriptor* views[3] = {&trip.forward, &trip.left, &trip.right};
    for (int v = 0; v < 3; ++v) {
      const double offset = gridworld::kThreeViewOffsets[v];
      Pose cam = trip.pose;
      cam.theta = gridworld::wrap_angle(trip.pose.theta + offset);
      views[v]->view_offset = offset;
      views[v]->cells = gridworld::visible_cells(grid, cam, hfov, range_m);
    }
    out.push_back(std::move(trip));
  }
  return out;
}

FollowResult follow(const OccupancyGrid& grid, const Pose& from, Cell target,
                    double delta_max, double proximity) {
  if (delta_max <= 0.0 || proximity <= 0.0)
    throw std::invalid_argument("follow: delta_max and proximity must be positive");
  const Cell start = grid.cell_of(from.x, from.y);
  auto path = search(grid, start, target,
                     [&](Cell c) { return grid.at(c) == CellState::Free; });
  if (!path || grid.at(start) != CellState::Free)
    throw NoPath("follow: target unreachable over Free cells");

  const Pose target_center = grid.center(target);
  FollowResult result{from, 0.0, false};
  auto near_target = [&](double px, double py) {
    return std::hypot(target_center.x - px, target_center.y - py) <= proximity;
  };
  if (near_target(result.pose.x, result.pose.y)) {
    result.reached = true;
    return result;
  }

  const double cap = delta_max + grid.resolution();
  for (std::size_t i = 1; i < path->cells.size(); ++i) {
    const Pose next = grid.center(path->cells[i]);
    const double hop = std::hypot(next.x - result.pose.x, next.y - result.pose.y);
    if (hop == 0.0) continue;
    if (result.traveled + hop > cap) break;
    result.pose.theta = std::atan2(next.y - result.pose.y, next.x - result.pose.x);
    result.pose.x = next.x;
    result.pose.y = next.y;
    result.traveled += hop;
    if (near_target(result.pose.x, result.pose.y)) {
      result.reached = true;
      break;
    }
    if (result.traveled >= delta_max) break;
  }
  // Face the target on arrival so the next perception sweep covers it.
  if (result.reached &&
      (target_center.x != result.pose.x || target_center.y != result.pose.y))
    result.pose.theta =
        std::atan2(target_center.y - result.pose.y, target_center.x - result.pose.x);
  return result;
}

std::optional<double> geodesic_distance(const OccupancyGrid& grid, Cell from, Cell to) {
  if (!grid.in_bounds(from) || !grid.in_bounds(to)) return std::nullopt;
  if (grid.at(from) != CellState::Free || grid.at(to) != CellState::Free) return std::nullopt;
  auto path = search(grid, from, to, [&](Cell c) { return grid.at(c) == CellState::Free; });
  if (!path) return std::nullopt;
  return path->length_m;
}

std::vector<double> geodesic_field(const OccupancyGrid& grid, Cell from) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(grid.cell_count(), inf);
  if (!grid.in_bounds(from) || grid.at(from) != CellState::Free) return dist;

  const int w = grid.width();
  const double res = grid.resolution();
  const double diag = res * std::sqrt(2.0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[grid.index(from)] = 0.0;
  open.push({0.0, grid.index(from)});
  while (!open.empty()) {
    const auto [d, idx] = open.top();
    open.pop();
    if (d > dist[idx]) continue;
    const Cell cur{static_cast<int>(idx % w), static_cast<int>(idx / w)};
    for (int k = 0; k < 8; ++k) {
      const Cell nb{cur.x + kDX[k], cur.y + kDY[k]};
      if (!grid.in_bounds(nb) || grid.at(nb) != CellState::Free) continue;
      const double nd = d + (k < 4 ? res : diag);
      const std::size_t nb_idx = grid.index(nb);
      if (nd < dist[nb_idx]) {
        dist[nb_idx] = nd;
        open.push({nd, nb_idx});
      }
    }
  }
  return dist;
}

}  // namespace sage::planner
