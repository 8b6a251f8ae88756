#include "sage/maze.hpp"

#include "sage/rng.hpp"

namespace sage::maze {

namespace {

void divide(OccupancyGrid& grid, rng::SplitMix64& rng, const MazeConfig& cfg, int x0, int y0,
            int x1, int y1) {
  const int w = x1 - x0 + 1;
  const int h = y1 - y0 + 1;
  if (w < 2 * cfg.min_room + 1 && h < 2 * cfg.min_room + 1) return;

  const bool horizontal = h >= w ? true : false;
  if (horizontal && h >= 2 * cfg.min_room + 1) {
    const int wall_y = y0 + cfg.min_room +
                       static_cast<int>(rng.uniform_index(h - 2 * cfg.min_room));
    const int gap = std::min(cfg.gap, w - 2);
    const int gap_x = x0 + 1 + static_cast<int>(rng.uniform_index(std::max(1, w - gap - 1)));
    for (int x = x0; x <= x1; ++x)
      if (x < gap_x || x >= gap_x + gap) grid.set(x, wall_y, CellState::Obstacle);
    divide(grid, rng, cfg, x0, y0, x1, wall_y - 1);
    divide(grid, rng, cfg, x0, wall_y + 1, x1, y1);
  } else if (!horizontal && w >= 2 * cfg.min_room + 1) {
    const int wall_x = x0 + cfg.min_room +
                       static_cast<int>(rng.uniform_index(w - 2 * cfg.min_room));
    const int gap = std::min(cfg.gap, h - 2);
    const int gap_y = y0 + 1 + static_cast<int>(rng.uniform_index(std::max(1, h - gap - 1)));
    for (int y = y0; y <= y1; ++y)
      if (y < gap_y || y >= gap_y + gap) grid.set(wall_x, y, CellState::Obstacle);
    divide(grid, rng, cfg, x0, y0, wall_x - 1, y1);
    divide(grid, rng, cfg, wall_x + 1, y0, x1, y1);
  }
}

}  // namespace

OccupancyGrid generate_maze(int width, int height, std::uint64_t seed, const MazeConfig& config) {
  OccupancyGrid grid(width, height, config.resolution, CellState::Free);
  for (int x = 0; x < width; ++x) {
    grid.set(x, 0, CellState::Obstacle);
    grid.set(x, height - 1, CellState::Obstacle);
  }
  for (int y = 0; y < height; ++y) {
    grid.set(0, y, CellState::Obstacle);
    grid.set(width - 1, y, CellState::Obstacle);
  }
  rng::SplitMix64 rng(seed);
  divide(grid, rng, config, 1, 1, width - 2, height - 2);
  return grid;
}

}  // namespace sage::maze
