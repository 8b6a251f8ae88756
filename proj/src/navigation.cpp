#include "sage/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sage/gridworld.hpp"
#include "sage/rng.hpp"

namespace sage::navigation {

namespace {

std::string label_join(const std::set<std::string>& labels) {
  if (labels.empty()) return "an open passage ahead";
  std::string text;
  for (const auto& l : labels) {
    if (!text.empty()) text += ", ";
    text += l;
  }
  return text + " ahead";
}

double euclid(const Pose& a, const Pose& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

const char* to_string(EpisodeOutcome o) {
  switch (o) {
    case EpisodeOutcome::AnsweredFromMemory: return "answered_from_memory";
    case EpisodeOutcome::ReachedTarget: return "reached_target";
    case EpisodeOutcome::StepBudgetExhausted: return "step_budget_exhausted";
    case EpisodeOutcome::InvalidDecision: return "invalid_decision";
  }
  return "invalid_decision";
}

std::vector<Cell> frontier_cells(const OccupancyGrid& explored) {
  std::vector<Cell> out;
  for (int y = 0; y < explored.height(); ++y) {
    for (int x = 0; x < explored.width(); ++x) {
      if (explored.at(x, y) != CellState::Free) continue;
      const Cell c{x, y};
      const Cell neighbors[4] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
      for (const Cell& nb : neighbors) {
        if (explored.in_bounds(nb) && explored.at(nb) == CellState::Unknown) {
          out.push_back(c);
          break;
        }
      }
    }
  }
  return out;
}

FrontierBuffer compute_frontiers(const OccupancyGrid& explored, const MemoryBuffer& memory,
                                 double descriptor_range_m) {
  const std::vector<Cell> cells = frontier_cells(explored);
  FrontierBuffer buffer;
  if (cells.empty()) return buffer;

  const auto field = gridworld::compute_distance_field(explored);

  std::vector<char> mask(explored.cell_count(), 0);
  for (Cell c : cells) mask[explored.index(c)] = 1;
  std::vector<char> seen(explored.cell_count(), 0);

  for (Cell seed : cells) {
    if (seen[explored.index(seed)]) continue;
    // 8-connected flood fill over frontier cells.
    std::vector<Cell> cluster;
    std::vector<Cell> stack{seed};
    seen[explored.index(seed)] = 1;
    while (!stack.empty()) {
      const Cell cur = stack.back();
      stack.pop_back();
      cluster.push_back(cur);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const Cell nb{cur.x + dx, cur.y + dy};
          if (!explored.in_bounds(nb)) continue;
          const std::size_t idx = explored.index(nb);
          if (mask[idx] && !seen[idx]) {
            seen[idx] = 1;
            stack.push_back(nb);
          }
        }
      }
    }
    std::sort(cluster.begin(), cluster.end());

    FrontierNode node;
    node.cluster_size = static_cast<int>(cluster.size());
    node.cell = cluster.front();
    std::int64_t best_clearance = -1;
    for (Cell c : cluster) {
      const std::int64_t clr = field.has_obstacle() ? field.squared_cells(c)
                                                    : std::numeric_limits<std::int64_t>::max();
      if (clr > best_clearance) {
        best_clearance = clr;
        node.cell = c;
      }
    }

    const Pose rep = explored.center(node.cell);
    std::set<std::string> labels;
    for (const auto& entry : memory.entries) {
      if (euclid(rep, explored.center(entry.cell)) <= descriptor_range_m)
        labels.insert(entry.label);
    }
    node.labels.assign(labels.begin(), labels.end());
    node.descriptor_text = label_join(labels);
    buffer.nodes.push_back(std::move(node));
  }
  return buffer;
}

void perceive(NavigationState& state, const OccupancyGrid& true_grid,
              const genesis::SyntheticScene& scene, const NavigationConfig& cfg) {
  const Cell pose_cell = true_grid.cell_of(state.pose.x, state.pose.y);
  if (true_grid.at(pose_cell) != CellState::Free)
    throw PoseInObstacle("perceive: pose is not on a Free cell");

  // Panoramic sweep: 7 views at 40-degree offsets on the first step, 3 views
  // at 60-degree offsets afterwards.
  std::vector<double> offsets;
  if (state.step == 0) {
    for (int k = -3; k <= 3; ++k) offsets.push_back(k * (2.0 * M_PI / 9.0));
  } else {
    offsets = {-M_PI / 3.0, 0.0, M_PI / 3.0};
  }

  std::vector<Cell> revealed;
  for (double off : offsets) {
    Pose cam = state.pose;
    cam.theta = gridworld::wrap_angle(state.pose.theta + off);
    for (Cell c : gridworld::visible_cells(true_grid, cam, cfg.hfov, cfg.range_m)) {
      state.explored.set(c, true_grid.at(c));
      revealed.push_back(c);
    }
  }

  // The immediate neighborhood counts as explored. Line of sight is still
  // required: a 0.7 m disc may cross a thin wall, and revealing cells behind
  // it would create unreachable explored pockets.
  {
    Pose all_around = state.pose;
    for (Cell c : gridworld::visible_cells(true_grid, all_around, 2.0 * M_PI, cfg.reveal_radius)) {
      state.explored.set(c, true_grid.at(c));
      revealed.push_back(c);
    }
  }

  std::sort(revealed.begin(), revealed.end());
  revealed.erase(std::unique(revealed.begin(), revealed.end()), revealed.end());
  for (const auto& obj : scene.objects) {
    if (!std::binary_search(revealed.begin(), revealed.end(), obj.cell)) continue;
    if (state.memory.contains(obj.label, obj.cell)) continue;
    MemoryEntry entry;
    entry.label = obj.label;
    entry.cell = obj.cell;
    entry.first_seen_step = state.step;
    entry.object_id = obj.id;
    entry.descriptor_text = genesis::describe_object(obj);
    state.memory.entries.push_back(std::move(entry));
  }

  state.frontiers = compute_frontiers(state.explored, state.memory, cfg.range_m);
}

std::vector<ActionCandidate> action_candidates(const NavigationState& state,
                                               const NavigationConfig& cfg) {
  // Shadow edges can reveal cells with no explored path to them yet; such
  // candidates are not plannable and are deferred until connected.
  const Cell pose_cell = state.explored.cell_of(state.pose.x, state.pose.y);
  const std::vector<double> reach = planner::geodesic_field(state.explored, pose_cell);
  auto reachable = [&](Cell c) { return std::isfinite(reach[state.explored.index(c)]); };

  std::vector<ActionCandidate> out;
  for (std::size_t i = 0; i < state.frontiers.nodes.size(); ++i) {
    const auto& node = state.frontiers.nodes[i];
    if (!reachable(node.cell)) continue;
    ActionCandidate c;
    c.action = {Action::Kind::Frontier, static_cast<int>(i)};
    c.cell = node.cell;
    c.descriptor_text = node.descriptor_text;
    c.novelty = std::min(1.0, node.cluster_size / 20.0);
    c.object_count = static_cast<int>(node.labels.size());
    out.push_back(std::move(c));
  }

  Eigen::VectorXd query_embedding;
  if (!state.query.empty()) query_embedding = experience::embed(state.query);
  for (std::size_t i = 0; i < state.memory.entries.size(); ++i) {
    const auto& entry = state.memory.entries[i];
    if (!reachable(entry.cell)) continue;
    if (query_embedding.size() > 0) {
      // Pre-filtering: drop memory entries unrelated to the query.
      const double affinity = query_embedding.dot(experience::embed(entry.descriptor_text));
      if (affinity <= cfg.prefilter_threshold) continue;
    }
    ActionCandidate c;
    c.action = {Action::Kind::Memory, static_cast<int>(i)};
    c.cell = entry.cell;
    c.descriptor_text = entry.descriptor_text;
    c.novelty = 0.0;
    c.object_count = 1;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> PolicyScorer::score(const NavigationState& state,
                                        const std::vector<ActionCandidate>& candidates,
                                        const experience::RetrievedContext& retrieved) const {
  Eigen::VectorXd experience_embedding;
  if (!retrieved.empty())
    experience_embedding = experience::embed(retrieved.joined_scene_text());

  // Geodesic cost from the robot to each candidate over the explored map.
  const Cell pose_cell = state.explored.cell_of(state.pose.x, state.pose.y);
  const std::vector<double> field = planner::geodesic_field(state.explored, pose_cell);
  std::vector<double> dist(candidates.size(), 10.0);
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double d = field[state.explored.index(candidates[i].cell)];
    if (std::isfinite(d)) dist[i] = d;
    min_dist = std::min(min_dist, dist[i]);
  }
  if (!std::isfinite(min_dist)) min_dist = 0.0;

  Eigen::MatrixXd features(static_cast<Eigen::Index>(candidates.size()), evolution::kFeatureDim);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& cand = candidates[i];
    const Pose cc = state.explored.center(cand.cell);
    Eigen::VectorXd f(evolution::kFeatureDim);
    f[0] = std::min(std::floor((dist[i] - min_dist) / 0.5), 4.0);
    f[1] = cand.novelty;
    f[2] = experience_embedding.size() > 0
               ? experience_embedding.dot(experience::embed(cand.descriptor_text))
               : 0.0;
    const double bearing = std::atan2(cc.y - state.pose.y, cc.x - state.pose.x);
    f[3] = std::cos(gridworld::wrap_angle(bearing - state.pose.theta));
    f[4] = cand.action.kind == Action::Kind::Memory ? 1.0 : 0.0;
    f[5] = 0.0;  // ground-truth flag exists only in training contexts
    f[6] = std::min(cand.object_count, 8) / 8.0;
    f[7] = 1.0;
    features.row(static_cast<Eigen::Index>(i)) = f;
  }
  const Eigen::VectorXd scores = features * policy_->weights();
  return {scores.data(), scores.data() + scores.size()};
}

std::vector<double> OracleScorer::score(const NavigationState& state,
                                        const std::vector<ActionCandidate>& candidates,
                                        const experience::RetrievedContext&) const {
  // Total-cost greedy: travel to the frontier over the explored map plus the
  // true remaining geodesic from there, so the robot never detours far off
  // the shortest route to the target.
  const std::vector<double> to_target = planner::geodesic_field(*true_grid_, target_);
  const Cell pose_cell = state.explored.cell_of(state.pose.x, state.pose.y);
  const std::vector<double> from_pose = planner::geodesic_field(state.explored, pose_cell);
  std::vector<double> scores(candidates.size(), 0.0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& cand = candidates[i];
    if (cand.action.kind == Action::Kind::Memory) {
      const MemoryEntry& entry = state.memory.entries[static_cast<std::size_t>(cand.action.index)];
      scores[i] = (entry.cell == target_ && entry.label == target_label_) ? 1e9 : -1e9;
      continue;
    }
    const double remaining = to_target[true_grid_->index(cand.cell)];
    const double approach = from_pose[state.explored.index(cand.cell)];
    scores[i] = (std::isfinite(remaining) && std::isfinite(approach)) ? -(approach + remaining)
                                                                      : -1e8;
    // Stay committed to the previously pursued frontier while it remains
    // competitive; near-tied alternatives otherwise cause ping-ponging.
    const double dx = (cand.cell.x - committed_.x) * true_grid_->resolution();
    const double dy = (cand.cell.y - committed_.y) * true_grid_->resolution();
    if (std::hypot(dx, dy) <= 0.5) scores[i] += 1.0;
    if (scores[i] > scores[best]) best = i;
  }
  if (!candidates.empty())
    committed_ = candidates[best].action.kind == Action::Kind::Frontier ? candidates[best].cell
                                                                        : Cell{-1, -1};
  return scores;
}

std::vector<double> RandomScorer::score(const NavigationState& state,
                                        const std::vector<ActionCandidate>& candidates,
                                        const experience::RetrievedContext&) const {
  rng::SplitMix64 rng(rng::derive_seed(seed_, static_cast<std::uint64_t>(state.step)));
  std::vector<double> scores(candidates.size());
  for (auto& s : scores) s = rng.uniform();
  return scores;
}

std::vector<double> FirstFrontierScorer::score(const NavigationState&,
                                               const std::vector<ActionCandidate>& candidates,
                                               const experience::RetrievedContext&) const {
  std::vector<double> scores(candidates.size(), 0.0);
  for (std::size_t i = 0; i < candidates.size(); ++i)
    scores[i] = candidates[i].action.kind == Action::Kind::Frontier ? 1.0 : -1.0;
  if (!candidates.empty() && candidates.front().action.kind == Action::Kind::Frontier)
    scores[0] = 2.0;
  return scores;
}

Selection select_action(const ActionScorer& scorer, const NavigationState& state,
                        const experience::Store& store, const NavigationConfig& cfg) {
  const std::vector<ActionCandidate> candidates = action_candidates(state, cfg);
  if (candidates.empty()) throw EmptyActionSpace("select_action: no frontier or memory candidate");

  std::set<std::string> scene_labels;
  for (const auto& e : state.memory.entries) scene_labels.insert(e.label);
  experience::RetrievedContext retrieved;
  switch (cfg.mode) {
    case NavigationConfig::ExperienceMode::Matched:
      if (store.size() > 0)
        retrieved = store.retrieve(state.query, label_join(scene_labels), cfg.retrieval_k);
      break;
    case NavigationConfig::ExperienceMode::Mismatched:
      if (store.size() > 0)
        retrieved = store.retrieve_mismatched(state.query, label_join(scene_labels), cfg.retrieval_k);
      break;
    case NavigationConfig::ExperienceMode::Random:
      retrieved = store.retrieve_random(
          rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(state.step)));
      break;
    case NavigationConfig::ExperienceMode::None:
      break;
  }

  const std::vector<double> scores = scorer.score(state, candidates, retrieved);

  // Argmax with deterministic ties: candidates are ordered frontier-first,
  // lowest index first, so strict improvement keeps the preferred candidate.
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;

  Selection sel;
  sel.action = candidates[best].action;
  for (const auto& sr : retrieved.rules) sel.retrieved_rule_ids.push_back(sr.rule.id);
  return sel;
}

std::string answer_from_memory(const genesis::TaskTuple& task, const MemoryEntry& entry,
                               const MemoryBuffer& memory, const genesis::SyntheticScene& scene) {
  const genesis::SceneObject* obj =
      entry.object_id >= 0 && entry.object_id < static_cast<int>(scene.objects.size())
          ? &scene.object(entry.object_id)
          : nullptr;
  auto capitalize = [](std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  };
  auto article = [](const std::string& noun) {
    if (noun.empty()) return std::string("a");
    switch (std::tolower(static_cast<unsigned char>(noun[0]))) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return std::string("an");
      default: return std::string("a");
    }
  };
  auto phrase = [](genesis::Relation r) -> std::string {
    switch (r) {
      case genesis::Relation::LeftOf: return "to the left of";
      case genesis::Relation::RightOf: return "to the right of";
      case genesis::Relation::Near: return "near";
      case genesis::Relation::Above: return "above";
      case genesis::Relation::Below: return "below";
      case genesis::Relation::InRoom: return "in the same room as";
    }
    return "near";
  };
  auto count_word = [](std::size_t n) -> std::string {
    static const char* words[] = {"zero", "one", "two",   "three", "four",
                                  "five", "six", "seven", "eight", "nine"};
    return n < 10 ? words[n] : std::to_string(n);
  };

  switch (task.category) {
    case genesis::TaskCategory::ObjectRecognition:
      return capitalize(article(entry.label)) + " " + entry.label + ".";
    case genesis::TaskCategory::WorldKnowledge:
      return capitalize(article(entry.label)) + " " + entry.label + " is visible.";
    case genesis::TaskCategory::AttributeRecognition: {
      if (obj) {
        if (auto it = obj->attributes.find("color"); it != obj->attributes.end())
          return capitalize(it->second) + ".";
      }
      return "Unknown.";
    }
    case genesis::TaskCategory::ObjectStateRecognition: {
      if (obj) {
        if (auto it = obj->attributes.find("state"); it != obj->attributes.end())
          return "The " + entry.label + " is " + it->second + ".";
      }
      return "The " + entry.label + " is present.";
    }
    case genesis::TaskCategory::Counting: {
      std::size_t n = 0;
      for (const auto& e : memory.entries)
        if (e.label == entry.label) ++n;
      return capitalize(count_word(n)) + ".";
    }
    case genesis::TaskCategory::ObjectLocalization: {
      if (obj) {
        for (const auto& triple : scene.graph) {
          if (triple.subject != obj->id || triple.relation == genesis::Relation::Near) continue;
          const auto& other = scene.object(triple.object);
          if (!memory.contains(other.label, other.cell)) continue;
          return "The " + entry.label + " is " + phrase(triple.relation) + " the " + other.label + ".";
        }
      }
      return "The " + entry.label + " is directly ahead.";
    }
    case genesis::TaskCategory::SpatialUnderstanding: {
      if (obj) {
        for (const auto& triple : scene.graph) {
          if (triple.subject != obj->id) continue;
          if (triple.relation == genesis::Relation::Near ||
              triple.relation == genesis::Relation::InRoom)
            continue;
          const auto& other = scene.object(triple.object);
          if (!memory.contains(other.label, other.cell)) continue;
          return "The " + entry.label + " is " + phrase(triple.relation) + " the " + other.label + ".";
        }
      }
      return "The " + entry.label + " is near another object.";
    }
    case genesis::TaskCategory::FunctionalReasoning:
      return "The " + entry.label + ".";
  }
  return "Unknown.";
}

EpisodeResult run_episode(const genesis::TaskTuple& task, const OccupancyGrid& true_grid,
                          const genesis::SyntheticScene& scene, const ActionScorer& scorer,
                          const experience::Store& store, Pose start,
                          const NavigationConfig& cfg, EpisodeMode mode) {
  EpisodeResult result;
  NavigationState state;
  state.query = task.question;
  state.pose = start;
  state.explored = OccupancyGrid(true_grid.width(), true_grid.height(), true_grid.resolution(),
                                 CellState::Unknown);

  const Cell start_cell = true_grid.cell_of(start.x, start.y);
  if (auto l = planner::geodesic_distance(true_grid, start_cell, task.target_cell))
    result.shortest_m = *l;

  const Pose target_center = true_grid.center(task.target_cell);

  std::optional<EpisodeOutcome> outcome;
  int steps_used = 0;
  try {
    for (state.step = 0; state.step < cfg.t_max && !outcome; ++state.step) {
      perceive(state, true_grid, scene, cfg);
      ++steps_used;
      const Selection sel = select_action(scorer, state, store, cfg);

      StepRecord record;
      record.t = state.step;
      record.pose = state.pose;
      record.retrieved_rule_ids = sel.retrieved_rule_ids;

      if (sel.action.kind == Action::Kind::Memory) {
        const MemoryEntry entry = state.memory.entries[static_cast<std::size_t>(sel.action.index)];
        record.action_kind = "memory";
        record.action_target = entry.label;

        if (mode == EpisodeMode::QuestionAnswering) {
          result.answer_text = answer_from_memory(task, entry, state.memory, scene);
          outcome = EpisodeOutcome::AnsweredFromMemory;
        } else {
          // Navigate to the selected entry, halting at the verification
          // distance; bounded so the episode always terminates.
          for (int hop = 0; hop < 4 * cfg.t_max; ++hop) {
            const auto f = planner::follow(state.explored, state.pose, entry.cell, cfg.delta_max,
                                           cfg.memory_proximity);
            state.pose = f.pose;
            state.path_accumulator += f.traveled;
            record.traveled += f.traveled;
            if (f.reached || f.traveled == 0.0) break;
          }
          outcome = EpisodeOutcome::ReachedTarget;
        }
        result.trace.push_back(std::move(record));
        break;
      }

      const FrontierNode& node = state.frontiers.nodes[static_cast<std::size_t>(sel.action.index)];
      record.action_kind = "frontier";
      record.action_target = std::to_string(node.cell.x) + "," + std::to_string(node.cell.y);
      // Standing at the proximity ring of a frontier whose unknown side is
      // occluded would stall forever; step onto the node itself instead.
      double proximity = cfg.proximity;
      if (euclid(state.pose, state.explored.center(node.cell)) <= cfg.proximity)
        proximity = 0.5 * state.explored.resolution();
      const auto f =
          planner::follow(state.explored, state.pose, node.cell, cfg.delta_max, proximity);
      state.pose = f.pose;
      state.path_accumulator += f.traveled;
      record.traveled = f.traveled;
      result.trace.push_back(std::move(record));
    }
  } catch (const std::exception&) {
    outcome = EpisodeOutcome::InvalidDecision;
  }

  result.outcome = outcome.value_or(EpisodeOutcome::StepBudgetExhausted);
  result.steps = steps_used;
  result.path_m = state.path_accumulator;
  result.final_pose = state.pose;
  result.goal_success = euclid(state.pose, target_center) <= cfg.goal_success_radius;
  return result;
}

}  // namespace sage::navigation
