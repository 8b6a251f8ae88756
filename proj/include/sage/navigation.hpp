#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sage/evolution.hpp"
#include "sage/experience.hpp"
#include "sage/genesis.hpp"
#include "sage/grid.hpp"
#include "sage/metrics.hpp"
#include "sage/planner.hpp"

namespace sage::navigation {

struct FrontierNode {
  Cell cell;  // cluster representative: maximum clearance, ties lowest index
  int cluster_size = 0;
  std::string descriptor_text;  // labels remembered near the representative
  std::vector<std::string> labels;
};

struct FrontierBuffer {
  std::vector<FrontierNode> nodes;
};

struct MemoryEntry {
  std::string label;
  Cell cell;
  int first_seen_step = 0;
  int object_id = -1;
  std::string descriptor_text;
};

struct MemoryBuffer {
  std::vector<MemoryEntry> entries;

  bool contains(const std::string& label, Cell cell) const {
    for (const auto& e : entries)
      if (e.cell == cell && e.label == label) return true;
    return false;
  }
};

struct NavigationConfig {
  int t_max = 50;
  double delta_max = 1.0;
  double proximity = 0.5;
  double memory_proximity = 0.75;  // verification halt distance for memory targets
  double goal_success_radius = 1.0;
  double hfov = gridworld::kDefaultHfov;
  double range_m = gridworld::kDefaultRange;
  double reveal_radius = 0.7;
  double prefilter_threshold = 0.1;  // memory kept when query cosine exceeds this
  int retrieval_k = 1;
  int initial_views = 7;    // panorama at step 0
  int later_views = 3;
  enum class ExperienceMode { Matched, Mismatched, None, Random } mode = ExperienceMode::Matched;
  std::uint64_t seed = 0;
};

/// Episode state R_t: the query plus the memory and frontier buffers over the
/// progressively explored map.
struct NavigationState {
  std::string query;
  MemoryBuffer memory;
  FrontierBuffer frontiers;
  Pose pose;
  OccupancyGrid explored;
  int step = 0;
  double path_accumulator = 0.0;
};

struct PoseInObstacle : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyActionSpace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reveals the panoramic views at the current pose into the explored map,
/// marks the surrounding radius explored, appends newly seen objects to
/// memory, and recomputes the frontier buffer.
void perceive(NavigationState& state, const OccupancyGrid& true_grid,
              const genesis::SyntheticScene& scene, const NavigationConfig& cfg);

/// Frontier cells of a partially explored map: Free cells 4-adjacent to at
/// least one Unknown cell. Sorted row-major.
std::vector<Cell> frontier_cells(const OccupancyGrid& explored);

/// Clusters frontier cells (8-connectivity) into buffer nodes.
FrontierBuffer compute_frontiers(const OccupancyGrid& explored, const MemoryBuffer& memory,
                                 double descriptor_range_m);

struct Action {
  enum class Kind { Frontier, Memory } kind = Kind::Frontier;
  int index = 0;  // into the frontier node / memory entry list
};

struct ActionCandidate {
  Action action;
  Cell cell;
  std::string descriptor_text;
  double novelty = 0.0;
  int object_count = 0;
};

/// Scoring interface over the candidate action set; the reference policy,
/// the scripted oracle, and the random baseline all implement it.
class ActionScorer {
 public:
  virtual ~ActionScorer() = default;
  virtual std::vector<double> score(const NavigationState& state,
                                    const std::vector<ActionCandidate>& candidates,
                                    const experience::RetrievedContext& retrieved) const = 0;
};

/// Evolved linear-softmax policy over the shared candidate feature vector.
class PolicyScorer : public ActionScorer {
 public:
  explicit PolicyScorer(const evolution::ReferencePolicy& policy) : policy_(&policy) {}
  std::vector<double> score(const NavigationState& state,
                            const std::vector<ActionCandidate>& candidates,
                            const experience::RetrievedContext& retrieved) const override;

 private:
  const evolution::ReferencePolicy* policy_;
};

/// Scripted optimum: prefers the target object in memory, otherwise the
/// frontier minimizing travel cost plus true geodesic distance to the
/// target, with hysteresis so near-tied frontiers do not cause ping-ponging.
class OracleScorer : public ActionScorer {
 public:
  OracleScorer(const OccupancyGrid& true_grid, Cell target, std::string target_label)
      : true_grid_(&true_grid), target_(target), target_label_(std::move(target_label)) {}
  std::vector<double> score(const NavigationState& state,
                            const std::vector<ActionCandidate>& candidates,
                            const experience::RetrievedContext& retrieved) const override;

 private:
  const OccupancyGrid* true_grid_;
  Cell target_;
  std::string target_label_;
  mutable Cell committed_{-1, -1};  // frontier pursued on the previous step
};

class RandomScorer : public ActionScorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
  std::vector<double> score(const NavigationState& state,
                            const std::vector<ActionCandidate>& candidates,
                            const experience::RetrievedContext& retrieved) const override;

 private:
  std::uint64_t seed_;
};

/// Always the first frontier; falls back to the first candidate.
class FirstFrontierScorer : public ActionScorer {
 public:
  std::vector<double> score(const NavigationState& state,
                            const std::vector<ActionCandidate>& candidates,
                            const experience::RetrievedContext& retrieved) const override;
};

/// Candidate action set A = frontiers + pre-filtered memory entries.
std::vector<ActionCandidate> action_candidates(const NavigationState& state,
                                               const NavigationConfig& cfg);

struct Selection {
  Action action;
  std::vector<std::string> retrieved_rule_ids;
};

/// Retrieves experience per the configured mode, scores every candidate, and
/// returns the argmax (ties: frontier before memory, then lowest index).
Selection select_action(const ActionScorer& scorer, const NavigationState& state,
                        const experience::Store& store, const NavigationConfig& cfg);

enum class EpisodeOutcome { AnsweredFromMemory, ReachedTarget, StepBudgetExhausted, InvalidDecision };

const char* to_string(EpisodeOutcome o);

struct StepRecord {
  int t = 0;
  Pose pose;
  std::string action_kind;
  std::string action_target;
  std::vector<std::string> retrieved_rule_ids;
  double traveled = 0.0;
};

struct EpisodeResult {
  EpisodeOutcome outcome = EpisodeOutcome::InvalidDecision;
  std::string answer_text;
  int steps = 0;
  double path_m = 0.0;      // p
  double shortest_m = 0.0;  // l
  bool goal_success = false;
  Pose final_pose;
  std::vector<StepRecord> trace;
};

enum class EpisodeMode { QuestionAnswering, GoalReaching };

/// Reference answerer: rebuilds the category template from the selected
/// memory entry's stored label and attributes.
std::string answer_from_memory(const genesis::TaskTuple& task, const MemoryEntry& entry,
                               const MemoryBuffer& memory, const genesis::SyntheticScene& scene);

/// Algorithm-style episode loop: perceive, retrieve, select, execute, with a
/// hard step budget. Memory selections terminate the episode (answering for
/// QA tasks, navigating to the entry for goal-reaching ones).
EpisodeResult run_episode(const genesis::TaskTuple& task, const OccupancyGrid& true_grid,
                          const genesis::SyntheticScene& scene, const ActionScorer& scorer,
                          const experience::Store& store, Pose start,
                          const NavigationConfig& cfg, EpisodeMode mode);

}  // namespace sage::navigation
