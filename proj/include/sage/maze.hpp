#pragma once

#include <cstdint>

#include "sage/grid.hpp"

namespace sage::maze {

/// Recursive-division layout tuned so that rooms and doorways keep enough
/// clearance for the default safety threshold (5 cells): walls stop dividing
/// below `min_room`, and every wall carries a `gap` cells wide opening.
struct MazeConfig {
  int min_room = 18;
  int gap = 14;
  double resolution = 0.1;
};

OccupancyGrid generate_maze(int width, int height, std::uint64_t seed,
                            const MazeConfig& config = {});

}  // namespace sage::maze
