#include "sage/genesis.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <set>

#include "sage/rng.hpp"

namespace sage::genesis {

namespace {

const std::regex& task_regex() {
  static const std::regex re(
      R"(^Task: \[(ObjectRecognition|ObjectLocalization|AttributeRecognition|ObjectStateRecognition|Counting|WorldKnowledge|SpatialUnderstanding|FunctionalReasoning)\] Question: [^?]+\?( Options: \(A\) [^()]+ \(B\) [^()]+ \(C\) [^()]+ \(D\) [^()]+)?$)");
  return re;
}

const std::regex& answer_regex() {
  static const std::regex re(R"(^[A-Z0-9][^\r\n]*\.$)");
  return re;
}

std::vector<int> non_wall_objects(const SyntheticScene& scene, const std::vector<int>& ids,
                                  const std::vector<std::string>& wall_labels) {
  std::vector<int> out;
  for (int id : ids) {
    const std::string& label = scene.object(id).label;
    if (std::find(wall_labels.begin(), wall_labels.end(), label) == wall_labels.end())
      out.push_back(id);
  }
  return out;
}

std::string scene_text_for(const planner::ViewDescriptor& forward, const SyntheticScene& scene) {
  std::set<std::string> labels;
  for (int id : forward.object_ids) labels.insert(scene.object(id).label);
  if (labels.empty()) return "an open passage";
  std::string text;
  for (const auto& label : labels) {
    if (!text.empty()) text += ", ";
    text += label;
  }
  return text;
}

}  // namespace

const char* to_string(RejectionReason r) {
  switch (r) {
    case RejectionReason::NoPathFound: return "no_path_found";
    case RejectionReason::TrajectoryTooLong: return "trajectory_too_long";
    case RejectionReason::NoVisibleTarget: return "no_visible_target";
    case RejectionReason::MeaninglessTarget: return "meaningless_target";
    case RejectionReason::SynthesizerRefused: return "synthesizer_refused";
    case RejectionReason::TaskTemplateViolation: return "task_template_violation";
    case RejectionReason::RuleTemplateViolation: return "rule_template_violation";
  }
  return "unknown";
}

std::string format_instruction(TaskCategory category, const SynthesisResult& synth) {
  std::string out = std::string("Task: [") + to_string(category) + "] Question: " + synth.question;
  if (synth.format == AnswerFormat::MultipleChoice && synth.options.size() == 4) {
    const char tags[4] = {'A', 'B', 'C', 'D'};
    out += " Options:";
    for (int i = 0; i < 4; ++i)
      out += std::string(" (") + tags[i] + ") " + synth.options[static_cast<std::size_t>(i)];
  }
  return out;
}

bool matches_task_pattern(const std::string& instruction) {
  return std::regex_match(instruction, task_regex());
}

bool matches_answer_pattern(const std::string& answer) {
  return std::regex_match(answer, answer_regex());
}

TaskOrRejection synthesize_task(const SyntheticScene& scene,
                                const std::vector<planner::ObservationTriplet>& triplets,
                                const TaskSynthesizer& synth, std::uint64_t rng_seed,
                                const std::vector<std::string>& wall_labels) {
  if (triplets.empty()) throw std::invalid_argument("synthesize_task: no observations");
  const planner::ObservationTriplet& endpoint = triplets.back();
  const planner::ViewDescriptor& forward = endpoint.forward;

  if (forward.object_ids.empty())
    return Rejected{RejectionReason::NoVisibleTarget, "endpoint forward view has no objects"};
  const std::vector<int> candidates = non_wall_objects(scene, forward.object_ids, wall_labels);
  if (candidates.empty())
    return Rejected{RejectionReason::MeaninglessTarget,
                    "endpoint forward view shows only wall-class labels"};

  rng::SplitMix64 rng(rng_seed);
  SynthesisRequest request;
  request.scene = &scene;
  request.forward = &forward;
  request.visible_objects = candidates;
  request.category = static_cast<TaskCategory>(rng.uniform_index(kCategoryCount));
  request.seed = rng.next_u64();

  const SynthesisResult result = synth.synthesize(request);
  if (result.refused)
    return Rejected{RejectionReason::SynthesizerRefused, result.refusal_reason};

  TaskTuple task;
  task.instruction = format_instruction(request.category, result);
  task.question = result.question;
  task.category = request.category;
  task.ground_truth.answer_text = result.answer;
  task.ground_truth.forward_observation = endpoint.keypoint_order;
  task.format = result.format;
  task.options = result.options;
  task.correct_option = result.correct_option;
  const int target = result.target_object >= 0 ? result.target_object : candidates.front();
  task.target_cell = scene.object(target).cell;
  task.target_label = scene.object(target).label;
  return task;
}

std::vector<experience::ExperienceRule> synthesize_rules(
    const std::vector<planner::ObservationTriplet>& triplets, const TaskTuple& task,
    const SyntheticScene& scene, int embedding_dim) {
  std::vector<experience::ExperienceRule> rules;
  rules.reserve(triplets.size());
  for (const auto& trip : triplets) {
    const std::string scene_text = scene_text_for(trip.forward, scene);
    const std::string full =
        experience::format_rule_text("answering", task.question, scene_text);
    rules.push_back(experience::make_rule(
        task.id + "_r" + std::to_string(trip.keypoint_order), task.question, scene_text, full,
        task.trajectory_id, embedding_dim));
  }
  return rules;
}

VerifyResult verify(const TaskTuple& task, const std::vector<experience::ExperienceRule>& rules,
                    const SyntheticScene& scene,
                    const std::vector<planner::ObservationTriplet>& triplets,
                    const std::vector<std::string>& wall_labels) {
  if (triplets.empty())
    return VerifyResult::fail(RejectionReason::NoVisibleTarget, "no observations");
  const planner::ViewDescriptor& forward = triplets.back().forward;
  if (forward.object_ids.empty())
    return VerifyResult::fail(RejectionReason::NoVisibleTarget,
                              "endpoint forward view has no objects");
  if (non_wall_objects(scene, forward.object_ids, wall_labels).empty())
    return VerifyResult::fail(RejectionReason::MeaninglessTarget,
                              "endpoint forward view shows only wall-class labels");
  if (!matches_task_pattern(task.instruction))
    return VerifyResult::fail(RejectionReason::TaskTemplateViolation, task.instruction);
  if (!matches_answer_pattern(task.ground_truth.answer_text))
    return VerifyResult::fail(RejectionReason::TaskTemplateViolation,
                              task.ground_truth.answer_text);
  if (task.format == AnswerFormat::MultipleChoice &&
      (task.options.size() != 4 || task.correct_option < 0 || task.correct_option >= 4))
    return VerifyResult::fail(RejectionReason::TaskTemplateViolation,
                              "multiple choice requires 4 options with one correct");
  for (const auto& rule : rules) {
    if (!experience::matches_rule_pattern(rule.full_text))
      return VerifyResult::fail(RejectionReason::RuleTemplateViolation, rule.full_text);
  }
  return VerifyResult::ok();
}

Dataset generate_dataset(const std::vector<GridInstance>& grids, std::size_t n_tasks,
                         std::uint64_t master_seed, const PipelineConfig& config,
                         const TaskSynthesizer& synth) {
  if (grids.empty()) throw std::invalid_argument("generate_dataset: no grids");

  Dataset dataset;
  dataset.master_seed = master_seed;
  dataset.store = experience::Store(config.embedding_dim);

  struct GridContext {
    const GridInstance* inst;
    std::vector<Cell> safe;
  };
  std::vector<GridContext> contexts;
  for (std::size_t gi = 0; gi < grids.size(); ++gi) {
    const auto field = gridworld::compute_distance_field(grids[gi].grid);
    GridContext ctx{&grids[gi],
                    gridworld::safe_space(grids[gi].grid, field, config.safety_delta_cells)};
    if (ctx.safe.empty())
      throw std::runtime_error("generate_dataset: grid '" + grids[gi].id +
                               "' has an empty safe space at delta " +
                               std::to_string(config.safety_delta_cells));
    SyntheticScene scene = place_objects(grids[gi].grid, config.catalog, config.density,
                                         rng::derive_seed(master_seed, 0xA11CEull, gi),
                                         config.thresholds);
    scene.grid_id = grids[gi].id;
    dataset.scenes.push_back(std::move(scene));
    contexts.push_back(std::move(ctx));
  }

  auto reject = [&](RejectionReason r) { ++dataset.rejection_counts[to_string(r)]; };

  const std::size_t attempt_budget = config.max_attempts_per_task * std::max<std::size_t>(n_tasks, 1);
  std::size_t attempt = 0;
  for (; dataset.tasks.size() < n_tasks && attempt < attempt_budget; ++attempt) {
    const std::size_t gi = attempt % contexts.size();
    const GridContext& ctx = contexts[gi];
    const OccupancyGrid& grid = ctx.inst->grid;

    const auto sample = planner::sample_task_endpoints(
        grid, ctx.safe, rng::derive_seed(master_seed, 0xE9D0ull, attempt),
        config.max_trajectory_length_m);
    if (sample.status == planner::EndpointSample::Status::NoPathFound) {
      reject(RejectionReason::NoPathFound);
      continue;
    }
    if (sample.status == planner::EndpointSample::Status::TooLong) {
      reject(RejectionReason::TrajectoryTooLong);
      continue;
    }
    if (sample.trajectory->waypoints.size() < 2) {
      reject(RejectionReason::NoPathFound);  // degenerate single-cell path
      continue;
    }

    auto triplets = planner::discretize(grid, *sample.trajectory,
                                        rng::derive_seed(master_seed, 0xD15Cull, attempt),
                                        config.hfov, config.range_m);
    annotate_objects(triplets, dataset.scenes[gi]);

    auto outcome = synthesize_task(dataset.scenes[gi], triplets, synth,
                                   rng::derive_seed(master_seed, 0x7A5Cull, attempt),
                                   config.wall_labels);
    if (auto* rejected = std::get_if<Rejected>(&outcome)) {
      reject(rejected->reason);
      continue;
    }

    TaskTuple task = std::move(std::get<TaskTuple>(outcome));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "task_%06zu", dataset.tasks.size());
    task.id = buf;
    std::snprintf(buf, sizeof(buf), "traj_%06zu", attempt);
    task.trajectory_id = buf;

    auto rules = synthesize_rules(triplets, task, dataset.scenes[gi], config.embedding_dim);
    const VerifyResult v = verify(task, rules, dataset.scenes[gi], triplets, config.wall_labels);
    if (!v.accepted) {
      reject(*v.reason);
      continue;
    }

    DatasetTrajectory dt;
    dt.id = task.trajectory_id;
    dt.grid_id = ctx.inst->id;
    dt.trajectory = *sample.trajectory;
    for (const auto& trip : triplets) dt.keypoint_indices.push_back(trip.waypoint_index);
    dt.triplets = std::move(triplets);

    for (auto& rule : rules) {
      task.knowledge.push_back(rule.id);
      dataset.store.insert(std::move(rule));
    }

    TaskProvenance prov;
    prov.grid_id = ctx.inst->id;
    prov.master_seed = master_seed;
    prov.endpoints_seed = rng::derive_seed(master_seed, 0xE9D0ull, attempt);
    prov.discretize_seed = rng::derive_seed(master_seed, 0xD15Cull, attempt);
    prov.synthesis_seed = rng::derive_seed(master_seed, 0x7A5Cull, attempt);

    dataset.tasks.push_back(std::move(task));
    dataset.trajectories.push_back(std::move(dt));
    dataset.provenance.push_back(std::move(prov));
  }

  dataset.attempts = attempt;
  if (dataset.tasks.size() < n_tasks)
    throw std::runtime_error("generate_dataset: attempt budget exhausted after " +
                             std::to_string(attempt) + " attempts (" +
                             std::to_string(dataset.tasks.size()) + "/" +
                             std::to_string(n_tasks) + " tasks)");
  return dataset;
}

}  // namespace sage::genesis
