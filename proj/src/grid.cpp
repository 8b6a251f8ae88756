#include "sage/grid.hpp"

#include <fstream>
#include <sstream>

namespace sage {

std::vector<Cell> OccupancyGrid::free_cells() const {
  std::vector<Cell> out;
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      if (at(x, y) == CellState::Free) out.push_back({x, y});
  return out;
}

OccupancyGrid load_grid(std::istream& in) {
  int w = 0, h = 0;
  double res = 0.0;
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("grid file: empty input");
  {
    std::istringstream hs(header);
    if (!(hs >> w >> h >> res)) throw std::runtime_error("grid file: bad header, expected 'W H RESOLUTION'");
  }
  if (w < 2 || h < 2 || res <= 0.0) throw std::runtime_error("grid file: invalid dimensions or resolution");
  OccupancyGrid grid(w, h, res);
  for (int y = 0; y < h; ++y) {
    std::string row;
    if (!std::getline(in, row)) throw std::runtime_error("grid file: truncated, expected " + std::to_string(h) + " rows");
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (static_cast<int>(row.size()) != w)
      throw std::runtime_error("grid file: ragged row " + std::to_string(y) + " (got " +
                               std::to_string(row.size()) + " cells, expected " + std::to_string(w) + ")");
    for (int x = 0; x < w; ++x) {
      switch (row[x]) {
        case '.': grid.set(x, y, CellState::Free); break;
        case '#': grid.set(x, y, CellState::Obstacle); break;
        case '?': grid.set(x, y, CellState::Unknown); break;
        default:
          throw std::runtime_error(std::string("grid file: invalid cell character '") + row[x] + "'");
      }
    }
  }
  return grid;
}

OccupancyGrid load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file: " + path);
  return load_grid(in);
}

void save_grid(const OccupancyGrid& grid, std::ostream& out) {
  out << grid.width() << ' ' << grid.height() << ' ' << grid.resolution() << '\n';
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      switch (grid.at(x, y)) {
        case CellState::Free: out << '.'; break;
        case CellState::Obstacle: out << '#'; break;
        case CellState::Unknown: out << '?'; break;
      }
    }
    out << '\n';
  }
}

void save_grid_file(const OccupancyGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid file: " + path);
  save_grid(grid, out);
}

}  // namespace sage
