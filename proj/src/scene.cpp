#include "sage/scene.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sage/rng.hpp"

namespace sage::genesis {

namespace {

const std::vector<std::string>& color_palette() {
  static const std::vector<std::string> colors = {"red",   "blue", "green",  "white",
                                                  "black", "brown", "gray",  "yellow"};
  return colors;
}

// Labels that carry a binary state attribute, with their state domain.
const std::map<std::string, std::pair<std::string, std::string>>& state_domains() {
  static const std::map<std::string, std::pair<std::string, std::string>> domains = {
      {"cabinet", {"open", "closed"}}, {"book", {"open", "closed"}},
      {"television", {"on", "off"}},   {"lamp", {"on", "off"}},
      {"toaster", {"on", "off"}},
  };
  return domains;
}

}  // namespace

const char* to_string(Relation r) {
  switch (r) {
    case Relation::LeftOf: return "left_of";
    case Relation::RightOf: return "right_of";
    case Relation::Near: return "near";
    case Relation::Above: return "above";
    case Relation::Below: return "below";
    case Relation::InRoom: return "in_room";
  }
  return "near";
}

std::vector<int> SyntheticScene::objects_on(const std::vector<Cell>& cells) const {
  std::vector<int> out;
  for (const auto& obj : objects) {
    if (std::binary_search(cells.begin(), cells.end(), obj.cell)) out.push_back(obj.id);
  }
  return out;
}

std::vector<std::string> default_catalog() {
  return {"piano", "couch",  "bed",     "table", "chair",      "lamp", "plant", "sink",
          "toaster", "mirror", "cabinet", "book",  "vase", "television", "rug",  "bench"};
}

SyntheticScene place_objects(const OccupancyGrid& grid, const std::vector<std::string>& catalog,
                             double density, std::uint64_t rng_seed,
                             const RelationThresholds& thresholds) {
  if (catalog.empty()) throw std::invalid_argument("place_objects: empty catalog");
  if (density <= 0.0 || density > 0.2)
    throw std::invalid_argument("place_objects: density must be in (0, 0.2]");

  const std::vector<Cell> free = grid.free_cells();
  const std::size_t count =
      static_cast<std::size_t>(std::ceil(density * static_cast<double>(free.size())));
  if (count == 0 || count > free.size())
    throw NotEnoughFreeCells("place_objects: grid has too few free cells");

  rng::SplitMix64 rng(rng_seed);
  SyntheticScene scene;
  scene.objects.reserve(count);
  for (std::size_t idx : rng.sample_without_replacement(free.size(), count)) {
    SceneObject obj;
    obj.id = static_cast<int>(scene.objects.size());
    obj.cell = free[idx];
    obj.label = catalog[rng.uniform_index(catalog.size())];
    obj.attributes["color"] = color_palette()[rng.uniform_index(color_palette().size())];
    if (auto it = state_domains().find(obj.label); it != state_domains().end())
      obj.attributes["state"] = rng.bernoulli(0.5) ? it->second.first : it->second.second;
    scene.objects.push_back(std::move(obj));
  }

  const double near_sq = thresholds.near * thresholds.near;
  for (const auto& a : scene.objects) {
    for (const auto& b : scene.objects) {
      if (a.id == b.id) continue;
      const int dx = a.cell.x - b.cell.x;
      const int dy = a.cell.y - b.cell.y;
      if (dx < -thresholds.lateral) scene.graph.push_back({a.id, Relation::LeftOf, b.id});
      if (dx > thresholds.lateral) scene.graph.push_back({a.id, Relation::RightOf, b.id});
      if (dy < -thresholds.lateral) scene.graph.push_back({a.id, Relation::Above, b.id});
      if (dy > thresholds.lateral) scene.graph.push_back({a.id, Relation::Below, b.id});
      if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy <= near_sq)
        scene.graph.push_back({a.id, Relation::Near, b.id});
    }
  }
  return scene;
}

void annotate_objects(std::vector<planner::ObservationTriplet>& triplets,
                      const SyntheticScene& scene) {
  for (auto& trip : triplets) {
    for (planner::ViewDescriptor* view : {&trip.forward, &trip.left, &trip.right})
      view->object_ids = scene.objects_on(view->cells);
  }
}

}  // namespace sage::genesis
