#include "sage/gridworld.hpp"

#include <algorithm>
#include <cmath>

namespace sage::gridworld {

namespace {

using Int64Array = Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

DistanceField compute_distance_field(const OccupancyGrid& grid) {
  const int w = grid.width();
  const int h = grid.height();
  // A vertical distance larger than any in-grid distance; its square still
  // loses to every true obstacle contribution in the row scan.
  const std::int64_t inf = static_cast<std::int64_t>(w) + h;

  bool has_obstacle = false;

  // Pass 1: per-column vertical distance to the nearest obstacle row.
  Int64Array g(h, w);
  for (int x = 0; x < w; ++x) {
    g(0, x) = grid.at(x, 0) == CellState::Obstacle ? 0 : inf;
    for (int y = 1; y < h; ++y)
      g(y, x) = grid.at(x, y) == CellState::Obstacle ? 0 : std::min(g(y - 1, x) + 1, inf);
    for (int y = h - 2; y >= 0; --y)
      if (g(y + 1, x) + 1 < g(y, x)) g(y, x) = g(y + 1, x) + 1;
    for (int y = 0; y < h; ++y) has_obstacle |= g(y, x) == 0;
  }

  // Pass 2: per-row lower envelope of the parabolas i -> (x-i)^2 + g(i)^2
  // (Meijster scan). Integer arithmetic throughout keeps results exact.
  Int64Array sq(h, w);
  std::vector<int> s(w), t(w);
  for (int y = 0; y < h; ++y) {
    auto f = [&](std::int64_t x, int i) {
      const std::int64_t dx = x - i;
      return dx * dx + g(y, i) * g(y, i);
    };
    auto sep = [&](int i, int u) {
      return (static_cast<std::int64_t>(u) * u - static_cast<std::int64_t>(i) * i +
              g(y, u) * g(y, u) - g(y, i) * g(y, i)) /
             (2 * (static_cast<std::int64_t>(u) - i));
    };
    int q = 0;
    s[0] = 0;
    t[0] = 0;
    for (int u = 1; u < w; ++u) {
      while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
      if (q < 0) {
        q = 0;
        s[0] = u;
      } else {
        const std::int64_t start = 1 + sep(s[q], u);
        if (start < w) {
          ++q;
          s[q] = u;
          t[q] = static_cast<int>(start);
        }
      }
    }
    for (int x = w - 1; x >= 0; --x) {
      sq(y, x) = f(x, s[q]);
      if (x == t[q]) --q;
    }
  }

  return DistanceField(std::move(sq), grid.resolution(), has_obstacle);
}

std::vector<Cell> safe_space(const OccupancyGrid& grid, const DistanceField& field,
                             double delta_cells) {
  std::vector<Cell> out;
  const double threshold = delta_cells * delta_cells;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (grid.at(x, y) != CellState::Free) continue;
      if (!field.has_obstacle() ||
          static_cast<double>(field.squared_cells(x, y)) >= threshold)
        out.push_back({x, y});
    }
  }
  return out;
}

std::vector<Cell> visible_cells(const OccupancyGrid& grid, const Pose& pose,
                                double hfov, double range_m) {
  std::vector<Cell> out;
  const double res = grid.resolution();
  const Cell origin = grid.cell_of(pose.x, pose.y);
  const int radius = static_cast<int>(std::ceil(range_m / res)) + 1;
  const double step = res / 2.0;

  const int x_lo = std::max(0, origin.x - radius);
  const int x_hi = std::min(grid.width() - 1, origin.x + radius);
  const int y_lo = std::max(0, origin.y - radius);
  const int y_hi = std::min(grid.height() - 1, origin.y + radius);

  auto blocks = [&](Cell c) {
    const CellState state = grid.at(c);
    return state == CellState::Obstacle || state == CellState::Unknown;
  };

  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const Cell target{x, y};
      const Pose c = grid.center(target);
      const double dx = c.x - pose.x;
      const double dy = c.y - pose.y;
      const double dist = std::hypot(dx, dy);
      if (dist > range_m) continue;
      if (target != origin) {
        const double bearing = std::atan2(dy, dx);
        if (std::abs(wrap_angle(bearing - pose.theta)) > hfov / 2.0) continue;
      }
      if (dist == 0.0) {
        out.push_back(target);
        continue;
      }
      // March toward the target center; the first blocking cell decides.
      const int n = std::max(1, static_cast<int>(std::ceil(dist / step)));
      bool visible = true;
      for (int k = 1; k <= n; ++k) {
        const double frac = dist * k / n;
        const Cell q = grid.cell_of(pose.x + dx / dist * frac, pose.y + dy / dist * frac);
        if (q == target) break;
        if (blocks(q)) {
          visible = false;
          break;
        }
      }
      if (visible) out.push_back(target);
    }
  }
  return out;
}

}  // namespace sage::gridworld
