#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sage/experience.hpp"
#include "sage/grid.hpp"
#include "sage/planner.hpp"
#include "sage/scene.hpp"
#include "sage/synthesizer.hpp"

namespace sage::genesis {

struct GroundTruth {
  std::string answer_text;
  int forward_observation = 0;  // keypoint order whose forward view is a*
};

struct TaskTuple {
  std::string id;
  std::string instruction;  // canonical "Task: [..] Question: ..?" sentence
  std::string question;     // bare question text
  TaskCategory category = TaskCategory::ObjectRecognition;
  std::string trajectory_id;
  GroundTruth ground_truth;
  std::vector<std::string> knowledge;  // rule ids extracted from the trajectory
  AnswerFormat format = AnswerFormat::OpenEnded;
  std::vector<std::string> options;
  int correct_option = -1;
  Cell target_cell{};  // cell of the answer-bearing object
  std::string target_label;
};

enum class RejectionReason {
  NoPathFound,
  TrajectoryTooLong,
  NoVisibleTarget,
  MeaninglessTarget,
  SynthesizerRefused,
  TaskTemplateViolation,
  RuleTemplateViolation,
};

const char* to_string(RejectionReason r);

struct Rejected {
  RejectionReason reason;
  std::string detail;
};

using TaskOrRejection = std::variant<TaskTuple, Rejected>;

/// Canonical instruction sentence for a synthesized question.
std::string format_instruction(TaskCategory category, const SynthesisResult& synth);

bool matches_task_pattern(const std::string& instruction);
bool matches_answer_pattern(const std::string& answer);

inline const std::vector<std::string>& default_wall_labels() {
  static const std::vector<std::string> labels = {"wall", "ceiling", "floor"};
  return labels;
}

/// Builds a task tuple from the endpoint forward observation: samples a
/// category uniformly, invokes the synthesizer, and binds the ground truth
/// to the endpoint forward view. Rejects candidates whose endpoint view is
/// empty or wall-only, and synthesizer refusals.
TaskOrRejection synthesize_task(const SyntheticScene& scene,
                                const std::vector<planner::ObservationTriplet>& triplets,
                                const TaskSynthesizer& synth, std::uint64_t rng_seed,
                                const std::vector<std::string>& wall_labels = default_wall_labels());

/// One IF-AND-THEN rule per keypoint, each describing the forward view that
/// was preferred over the side views. Scene descriptions mention only labels
/// visible in that keypoint's forward view.
std::vector<experience::ExperienceRule> synthesize_rules(
    const std::vector<planner::ObservationTriplet>& triplets, const TaskTuple& task,
    const SyntheticScene& scene, int embedding_dim = experience::kDefaultEmbeddingDim);

struct VerifyResult {
  bool accepted = false;
  std::optional<RejectionReason> reason;
  std::string detail;

  static VerifyResult ok() { return {true, std::nullopt, ""}; }
  static VerifyResult fail(RejectionReason r, std::string detail = "") {
    return {false, r, std::move(detail)};
  }
};

/// Multi-stage rejection check over a complete candidate: endpoint visual
/// validity, task template compliance, and rule template compliance. Any
/// failure discards the whole trajectory.
VerifyResult verify(const TaskTuple& task, const std::vector<experience::ExperienceRule>& rules,
                    const SyntheticScene& scene,
                    const std::vector<planner::ObservationTriplet>& triplets,
                    const std::vector<std::string>& wall_labels = default_wall_labels());

struct PipelineConfig {
  double density = 0.08;
  std::vector<std::string> catalog = default_catalog();
  std::vector<std::string> wall_labels = default_wall_labels();
  RelationThresholds thresholds{};
  double safety_delta_cells = 5.0;
  double max_trajectory_length_m = 20.0;
  double hfov = gridworld::kDefaultHfov;
  double range_m = gridworld::kDefaultRange;
  int embedding_dim = experience::kDefaultEmbeddingDim;
  std::size_t max_attempts_per_task = 80;
};

struct GridInstance {
  std::string id;
  OccupancyGrid grid;
};

struct DatasetTrajectory {
  std::string id;
  std::string grid_id;
  planner::Trajectory trajectory;
  std::vector<int> keypoint_indices;
  std::vector<planner::ObservationTriplet> triplets;
};

struct TaskProvenance {
  std::string grid_id;
  std::uint64_t master_seed = 0;
  std::uint64_t endpoints_seed = 0;
  std::uint64_t discretize_seed = 0;
  std::uint64_t synthesis_seed = 0;
};

struct Dataset {
  std::vector<TaskTuple> tasks;
  std::vector<DatasetTrajectory> trajectories;  // aligned with tasks
  std::vector<TaskProvenance> provenance;       // aligned with tasks
  std::vector<SyntheticScene> scenes;           // one per grid
  experience::Store store;
  std::map<std::string, std::size_t> rejection_counts;
  std::size_t attempts = 0;
  std::uint64_t master_seed = 0;
};

/// End-to-end generation: grids -> scenes -> trajectories -> verified tasks
/// and rules. Deterministic for fixed (grids, seed, config).
Dataset generate_dataset(const std::vector<GridInstance>& grids, std::size_t n_tasks,
                         std::uint64_t master_seed, const PipelineConfig& config,
                         const TaskSynthesizer& synth);

}  // namespace sage::genesis
