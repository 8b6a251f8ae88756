#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sage/grid.hpp"
#include "sage/planner.hpp"

namespace sage::genesis {

enum class Relation { LeftOf, RightOf, Near, Above, Below, InRoom };

const char* to_string(Relation r);

struct SceneObject {
  int id = 0;
  std::string label;
  Cell cell;
  std::map<std::string, std::string> attributes;
};

struct SceneTriple {
  int subject = 0;
  Relation relation = Relation::Near;
  int object = 0;
};

/// Ground-truth object layout plus the geometric scene graph derived from it.
struct SyntheticScene {
  std::string grid_id;
  std::vector<SceneObject> objects;
  std::vector<SceneTriple> graph;

  const SceneObject& object(int id) const { return objects.at(static_cast<std::size_t>(id)); }

  /// Ids of objects located on any of the given cells, ascending.
  std::vector<int> objects_on(const std::vector<Cell>& cells) const;
};

struct NotEnoughFreeCells : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Geometric thresholds for scene-graph relations, in cell units.
struct RelationThresholds {
  int lateral = 2;      // |dx| or |dy| beyond this gives left/right/above/below
  double near = 5.0;    // Euclidean distance at or below this gives near
};

/// Places ceil(density * |Free|) labeled objects on distinct Free cells and
/// derives the scene graph from cell geometry. Labels are drawn from the
/// catalog with replacement; colors (and states, for stateful labels) are
/// attached as attributes.
SyntheticScene place_objects(const OccupancyGrid& grid, const std::vector<std::string>& catalog,
                             double density, std::uint64_t rng_seed,
                             const RelationThresholds& thresholds = {});

/// Fills view.object_ids of every observation with the scene objects whose
/// cells are visible in that view.
void annotate_objects(std::vector<planner::ObservationTriplet>& triplets,
                      const SyntheticScene& scene);

std::vector<std::string> default_catalog();

}  // namespace sage::genesis
