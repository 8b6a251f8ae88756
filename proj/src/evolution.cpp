#include "sage/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sage/gridworld.hpp"

namespace sage::evolution {

namespace {

std::string label_summary(const planner::ViewDescriptor& view, const genesis::SyntheticScene& scene) {
  std::set<std::string> labels;
  for (int id : view.object_ids) labels.insert(scene.object(id).label);
  if (labels.empty()) return "an open passage";
  std::string text;
  for (const auto& label : labels) {
    if (!text.empty()) text += ", ";
    text += label;
  }
  return text;
}

std::string answer_for_frame(const genesis::TaskTuple& task, const Frame& frame) {
  if (frame.is_ground_truth) return task.ground_truth.answer_text;
  return "The view shows " + frame.text + ".";
}

}  // namespace

double rouge_l_f1(const std::string& candidate, const std::string& reference) {
  const auto a = experience::tokenize(candidate);
  const auto b = experience::tokenize(reference);
  if (a.empty() || b.empty()) return 0.0;
  // Longest common subsequence over tokens.
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[b.size()]);
  if (lcs == 0.0) return 0.0;
  const double precision = lcs / static_cast<double>(a.size());
  const double recall = lcs / static_cast<double>(b.size());
  return 2.0 * precision * recall / (precision + recall);
}

double reward(bool format_ok, bool match_ok, const std::string& answer, const std::string& truth,
              bool error_flag, const EvolutionConfig& cfg) {
  const double sim = match_ok ? rouge_l_f1(answer, truth) : 0.0;
  const double accuracy = (match_ok ? 1.0 + sim : 0.0) -
                          ((error_flag || cfg.p_err_always) ? cfg.p_err : 0.0);
  return cfg.w_format * (format_ok ? 1.0 : 0.0) + cfg.w_accuracy * accuracy;
}

double eta_schedule(double r_val, const EvolutionConfig& cfg) {
  const double eta = cfg.eta_init * (1.0 - std::min(r_val, cfg.r_target) / cfg.r_target);
  return std::min(cfg.eta_init, std::max(cfg.eta_min, eta));
}

std::vector<Frame> make_frames(const genesis::TaskTuple& task,
                               const genesis::DatasetTrajectory& trajectory,
                               const genesis::SyntheticScene& scene, rng::SplitMix64& rng,
                               const EvolutionConfig& cfg) {
  const auto& triplets = trajectory.triplets;
  if (triplets.empty()) throw std::invalid_argument("make_frames: trajectory has no observations");

  // Remaining path length from each waypoint to the endpoint.
  const auto& cells = trajectory.trajectory.cells;
  std::vector<double> cumulative(cells.size(), 0.0);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const bool diagonal = cells[i].x != cells[i - 1].x && cells[i].y != cells[i - 1].y;
    cumulative[i] = cumulative[i - 1] +
                    (diagonal ? std::sqrt(2.0) : 1.0) * trajectory.trajectory.length_m /
                        std::max(1.0, trajectory.trajectory.exact.cells());
  }
  const double total = cumulative.back();

  auto build = [&](std::size_t order, int view) {
    const auto& trip = triplets[order];
    const planner::ViewDescriptor& desc =
        view == 0 ? trip.forward : (view == 1 ? trip.left : trip.right);
    Frame f;
    f.keypoint_order = static_cast<int>(order);
    f.view = view;
    f.goal_distance_m = total - cumulative[static_cast<std::size_t>(trip.waypoint_index)];
    f.view_offset = desc.view_offset;
    f.object_count = static_cast<int>(desc.object_ids.size());
    f.text = label_summary(desc, scene);
    f.text_embedding = experience::embed(f.text, experience::kDefaultEmbeddingDim);
    f.cells = desc.cells;
    return f;
  };

  const std::size_t gt_order = static_cast<std::size_t>(task.ground_truth.forward_observation);
  Frame gt = build(gt_order, 0);
  gt.is_ground_truth = true;

  std::vector<std::pair<std::size_t, int>> pool;
  for (std::size_t o = 0; o < triplets.size(); ++o)
    for (int v = 0; v < 3; ++v)
      if (!(o == gt_order && v == 0)) pool.emplace_back(o, v);
  // Distractors are drawn with a bias toward goal-proximal views, so the
  // ground truth cannot be singled out on geometry alone.
  std::sort(pool.begin(), pool.end(), [&](const auto& a, const auto& b) {
    const double da = total - cumulative[static_cast<std::size_t>(triplets[a.first].waypoint_index)];
    const double db = total - cumulative[static_cast<std::size_t>(triplets[b.first].waypoint_index)];
    if (da != db) return da < db;
    return a < b;
  });

  const std::size_t want =
      std::min(pool.size(), static_cast<std::size_t>(std::max(1, cfg.frames)) - 1);
  std::vector<Frame> frames{std::move(gt)};
  std::vector<char> used(pool.size(), 0);
  for (std::size_t k = 0; k < want; ++k) {
    std::size_t rank;
    do {
      const double u = rng.uniform();
      rank = static_cast<std::size_t>(u * u * static_cast<double>(pool.size()));
      if (rank >= pool.size()) rank = pool.size() - 1;
    } while (used[rank]);
    used[rank] = 1;
    frames.push_back(build(pool[rank].first, pool[rank].second));
  }
  return frames;
}

Context build_context(const genesis::TaskTuple& task, std::vector<Frame> frames,
                      const experience::Store* store, bool mask, rng::SplitMix64& rng,
                      const EvolutionConfig& cfg) {
  if (std::none_of(frames.begin(), frames.end(), [](const Frame& f) { return f.is_ground_truth; }))
    throw GroundTruthMissing("build_context: no ground-truth frame among candidates");

  Context ctx;
  ctx.task_id = task.id;
  ctx.instruction = task.instruction;
  ctx.truth = task.ground_truth.answer_text;
  rng.shuffle(frames);
  ctx.frames = std::move(frames);
  for (std::size_t i = 0; i < ctx.frames.size(); ++i)
    if (ctx.frames[i].is_ground_truth) ctx.gt_index = static_cast<int>(i);

  // Per-frame novelty: share of visible cells no other candidate shows.
  ctx.novelty.resize(ctx.frames.size(), 0.0);
  for (std::size_t i = 0; i < ctx.frames.size(); ++i) {
    if (ctx.frames[i].cells.empty()) continue;
    std::size_t unique = 0;
    for (const Cell& c : ctx.frames[i].cells) {
      bool shared = false;
      for (std::size_t j = 0; j < ctx.frames.size() && !shared; ++j)
        if (j != i) shared = std::binary_search(ctx.frames[j].cells.begin(),
                                                ctx.frames[j].cells.end(), c);
      if (!shared) ++unique;
    }
    ctx.novelty[i] = static_cast<double>(unique) / static_cast<double>(ctx.frames[i].cells.size());
  }

  ctx.has_experience = mask;
  if (mask && store != nullptr && store->size() > 0) {
    // The query is the question alone: its tokens carry the asked-about
    // label, which matches rule scene descriptions containing that object.
    ctx.retrieved = store->retrieve(task.question, "", cfg.retrieval_k);
    if (!ctx.retrieved.empty())
      ctx.experience_embedding =
          experience::embed(ctx.retrieved.joined_scene_text(), store->dimension());
  }
  return ctx;
}

Eigen::VectorXd frame_features(const Context& ctx, std::size_t frame_index,
                               const EvolutionConfig& cfg) {
  const Frame& frame = ctx.frames[frame_index];
  double min_goal = std::numeric_limits<double>::infinity();
  for (const auto& f : ctx.frames) min_goal = std::min(min_goal, f.goal_distance_m);

  Eigen::VectorXd f(kFeatureDim);
  // Coarse distance estimate: 0.5 m bins, capped. Frames close to the goal
  // alias into the same bin, so geometry alone cannot resolve them.
  f[0] = std::min(std::floor((frame.goal_distance_m - min_goal) / 0.5), 4.0);
  f[1] = ctx.novelty[frame_index];
  f[2] = (ctx.has_experience && !ctx.retrieved.empty() && ctx.experience_embedding.size() > 0)
             ? frame.text_embedding.dot(ctx.experience_embedding)
             : 0.0;
  f[3] = std::cos(frame.view_offset);
  f[4] = 0.0;  // is_memory: training candidates are observation frames
  f[5] = (cfg.expose_gt_flag && frame.is_ground_truth) ? 1.0 : 0.0;
  f[6] = std::min(frame.object_count, 8) / 8.0;
  f[7] = 1.0;
  return f;
}

Eigen::VectorXd ReferencePolicy::probabilities(const Eigen::VectorXd& w,
                                               const Eigen::MatrixXd& features,
                                               double temperature) {
  Eigen::VectorXd logits = features * w / temperature;
  const double m = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - m).exp();
  return p / p.sum();
}

int ReferencePolicy::sample(const Eigen::MatrixXd& features, double temperature,
                            rng::SplitMix64& rng) const {
  const Eigen::VectorXd p = probabilities(features, temperature);
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size() - 1);
}

int ReferencePolicy::argmax(const Eigen::MatrixXd& features) const {
  const Eigen::VectorXd scores = features * weights_;
  Eigen::Index best = 0;
  scores.maxCoeff(&best);
  return static_cast<int>(best);
}

double ReferencePolicy::log_prob(const Eigen::MatrixXd& features, int action,
                                 double temperature) const {
  return std::log(probabilities(features, temperature)[action]);
}

std::vector<double> group_advantages(const std::vector<double>& rewards, double epsilon_stab) {
  if (rewards.size() < 2) throw std::invalid_argument("group_advantages: need G >= 2");
  if (epsilon_stab <= 0.0) throw std::invalid_argument("group_advantages: stabilizer must be positive");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sigma = std::sqrt(var / n);  // population standard deviation
  std::vector<double> out(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i)
    out[i] = (rewards[i] - mean) / (sigma + epsilon_stab);
  return out;
}

double aac_objective(double rho, double advantage, bool mask, const EvolutionConfig& cfg) {
  if (rho <= 0.0) throw std::invalid_argument("aac_objective: rho must be positive");
  const double eps_up = mask ? cfg.eps_exp : cfg.eps_std;
  const double clipped = std::clamp(rho, 1.0 - cfg.eps_std, 1.0 + eps_up);
  return std::min(rho * advantage, clipped * advantage);
}

ObjectiveEval evaluate_objective(const Eigen::VectorXd& w, const Eigen::VectorXd& w_ref,
                                 const std::vector<RolloutGroup>& batch,
                                 const EvolutionConfig& cfg) {
  ObjectiveEval eval;
  eval.gradient = Eigen::VectorXd::Zero(w.size());

  std::size_t total_samples = 0;
  for (const auto& group : batch) total_samples += group.samples.size();
  if (total_samples == 0) return eval;
  const double inv_n = 1.0 / static_cast<double>(total_samples);

  double kl_sum = 0.0;
  int aug_total = 0, std_total = 0;

  for (const auto& group : batch) {
    const Eigen::MatrixXd& F = group.features;
    const Eigen::VectorXd p = ReferencePolicy::probabilities(w, F, cfg.temperature);
    const Eigen::VectorXd p_ref = ReferencePolicy::probabilities(w_ref, F, cfg.temperature);
    const Eigen::VectorXd mean_feature = F.transpose() * p;

    const Eigen::VectorXd log_ratio = (p.array() / p_ref.array()).log();
    const double kl = p.dot(log_ratio);

    // d/dw KL = (1/T) * sum_c p_c (f_c - mean_f) log(p_c / p_ref_c)
    Eigen::VectorXd kl_grad = Eigen::VectorXd::Zero(w.size());
    for (Eigen::Index c = 0; c < p.size(); ++c)
      kl_grad += p[c] * log_ratio[c] * (F.row(c).transpose() - mean_feature);
    kl_grad /= cfg.temperature;

    const double eps_up = group.mask ? cfg.eps_exp : cfg.eps_std;
    for (const auto& sample : group.samples) {
      const double new_lp = std::log(p[sample.action]);
      const double rho = std::exp(new_lp - sample.old_log_prob);
      const double clipped_rho = std::clamp(rho, 1.0 - cfg.eps_std, 1.0 + eps_up);
      const double unclipped = rho * sample.advantage;
      const double clipped = clipped_rho * sample.advantage;
      eval.objective += std::min(unclipped, clipped) * inv_n;

      if (clipped < unclipped) {
        // Clip actively binds; the clipped branch has zero gradient.
        if (group.mask) {
          ++aug_total;
          eval.clip_frac_exp += 1.0;
          if (rho > 1.0 + eps_up) ++eval.clipped_above_aug;
        } else {
          ++std_total;
          eval.clip_frac_std += 1.0;
          if (rho > 1.0 + eps_up) ++eval.clipped_above_std;
        }
        if (rho < 1.0 - cfg.eps_std) ++eval.clipped_below;
      } else {
        if (group.mask) ++aug_total; else ++std_total;
        const Eigen::VectorXd dlogp =
            (F.row(sample.action).transpose() - mean_feature) / cfg.temperature;
        eval.gradient += inv_n * sample.advantage * rho * dlogp;
      }

      eval.objective -= cfg.beta_kl * kl * inv_n;
      eval.gradient -= cfg.beta_kl * inv_n * kl_grad;
      kl_sum += kl;
    }
  }

  eval.mean_kl = kl_sum * inv_n;
  eval.clip_frac_exp = aug_total > 0 ? eval.clip_frac_exp / aug_total : 0.0;
  eval.clip_frac_std = std_total > 0 ? eval.clip_frac_std / std_total : 0.0;
  return eval;
}

UpdateReport policy_update(ReferencePolicy& policy, const std::vector<RolloutGroup>& batch,
                           const EvolutionConfig& cfg) {
  const ObjectiveEval eval =
      evaluate_objective(policy.weights(), policy.ref_weights(), batch, cfg);
  if (!std::isfinite(eval.objective) || !eval.gradient.allFinite())
    throw NonFiniteGradient("policy_update: non-finite objective or gradient");

  policy.set_weights(policy.weights() + cfg.learning_rate * eval.gradient);

  UpdateReport report;
  report.mean_objective = eval.objective;
  report.mean_kl = eval.mean_kl;
  report.grad_norm = eval.gradient.norm();
  report.clip_frac_exp = eval.clip_frac_exp;
  report.clip_frac_std = eval.clip_frac_std;
  report.clipped_above_aug = eval.clipped_above_aug;
  report.clipped_above_std = eval.clipped_above_std;
  report.clipped_below = eval.clipped_below;
  return report;
}

TrainingData split_dataset(const genesis::Dataset& dataset, const EvolutionConfig& cfg) {
  const std::size_t n = dataset.tasks.size();
  if (n < 2) throw std::invalid_argument("split_dataset: need at least 2 tasks");
  rng::SplitMix64 rng(rng::derive_seed(cfg.seed, 0x5711ull));

  const std::size_t val_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(n))));

  TrainingData data;
  data.dataset = &dataset;

  // Validation tasks come from held-out grids whenever the dataset spans
  // more than one scene, so validation trajectories never share a scene with
  // training ones. Single-scene datasets fall back to a task-level split.
  std::vector<std::string> grid_ids;
  for (const auto& traj : dataset.trajectories)
    if (std::find(grid_ids.begin(), grid_ids.end(), traj.grid_id) == grid_ids.end())
      grid_ids.push_back(traj.grid_id);

  if (grid_ids.size() > 1) {
    rng.shuffle(grid_ids);
    std::vector<std::string> val_grids;
    std::size_t assigned = 0;
    for (const auto& gid : grid_ids) {
      if (assigned >= val_count || val_grids.size() + 1 == grid_ids.size()) break;
      val_grids.push_back(gid);
      for (const auto& traj : dataset.trajectories)
        if (traj.grid_id == gid) ++assigned;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_val = std::find(val_grids.begin(), val_grids.end(),
                                    dataset.trajectories[i].grid_id) != val_grids.end();
      (in_val ? data.val_indices : data.train_indices).push_back(i);
    }
  } else {
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    rng.shuffle(indices);
    data.val_indices.assign(indices.begin(),
                            indices.begin() + static_cast<std::ptrdiff_t>(val_count));
    data.train_indices.assign(indices.begin() + static_cast<std::ptrdiff_t>(val_count),
                              indices.end());
  }
  if (data.train_indices.empty() || data.val_indices.empty())
    throw std::invalid_argument("split_dataset: degenerate split");

  data.train_store = experience::Store(dataset.store.dimension());
  for (std::size_t ti : data.train_indices) {
    for (const auto& rule_id : dataset.tasks[ti].knowledge) {
      if (auto rule = dataset.store.get(rule_id)) data.train_store.insert(std::move(*rule));
    }
  }
  return data;
}

namespace {

const genesis::SyntheticScene& scene_for(const genesis::Dataset& dataset,
                                         const genesis::DatasetTrajectory& traj) {
  for (const auto& scene : dataset.scenes)
    if (scene.grid_id == traj.grid_id) return scene;
  throw std::runtime_error("no scene recorded for grid " + traj.grid_id);
}

RolloutGroup make_group(const TrainingData& data, std::size_t task_index,
                        const experience::Store& store, const ReferencePolicy& policy,
                        bool mask, rng::SplitMix64& rng, const EvolutionConfig& cfg,
                        bool greedy) {
  const auto& dataset = *data.dataset;
  const auto& task = dataset.tasks[task_index];
  const auto& traj = dataset.trajectories[task_index];
  const auto& scene = scene_for(dataset, traj);

  RolloutGroup group;
  group.mask = mask;
  group.context = build_context(task, make_frames(task, traj, scene, rng, cfg), &store, mask,
                                rng, cfg);

  const std::size_t n = group.context.frames.size();
  group.features.resize(static_cast<Eigen::Index>(n), kFeatureDim);
  for (std::size_t i = 0; i < n; ++i)
    group.features.row(static_cast<Eigen::Index>(i)) = frame_features(group.context, i, cfg);

  const Eigen::VectorXd probs = policy.probabilities(group.features, cfg.temperature);
  const int rollouts = greedy ? 1 : cfg.group_size;
  for (int j = 0; j < rollouts; ++j) {
    PolicySample s;
    s.action = greedy ? policy.argmax(group.features)
                      : policy.sample(group.features, cfg.temperature, rng);
    const Frame& chosen = group.context.frames[static_cast<std::size_t>(s.action)];
    s.answer = answer_for_frame(task, chosen);
    const bool match = s.action == group.context.gt_index;
    s.reward = reward(true, match, s.answer, group.context.truth, !match, cfg);
    s.old_log_prob = std::log(probs[s.action]);
    group.samples.push_back(std::move(s));
  }
  return group;
}

}  // namespace

double evaluate_validation(const TrainingData& data, const experience::Store& store,
                           const ReferencePolicy& policy, const EvolutionConfig& cfg) {
  if (data.val_indices.empty()) return 0.0;

  // Per task the score is the exact expected reward under the current policy
  // distribution, so validation is smooth in the weights and free of
  // sampling noise. Deployment retrieval quality varies, so each task is
  // scored both with and without injected experience and the two regimes are
  // averaged (unless experience validation is disabled).
  auto expected_reward = [&](std::size_t task_index, std::size_t stream, bool mask) {
    rng::SplitMix64 rng(rng::derive_seed(cfg.seed, 0x7A11Dull, stream));
    const auto& dataset = *data.dataset;
    const auto& task = dataset.tasks[task_index];
    const auto& traj = dataset.trajectories[task_index];
    const auto& scene = scene_for(dataset, traj);

    Context ctx =
        build_context(task, make_frames(task, traj, scene, rng, cfg), &store, mask, rng, cfg);
    Eigen::MatrixXd features(static_cast<Eigen::Index>(ctx.frames.size()), kFeatureDim);
    for (std::size_t f = 0; f < ctx.frames.size(); ++f)
      features.row(static_cast<Eigen::Index>(f)) = frame_features(ctx, f, cfg);
    const Eigen::VectorXd probs = policy.probabilities(features, cfg.temperature);

    double expected = 0.0;
    for (std::size_t a = 0; a < ctx.frames.size(); ++a) {
      const bool match = static_cast<int>(a) == ctx.gt_index;
      const std::string answer = answer_for_frame(task, ctx.frames[a]);
      expected += probs[static_cast<Eigen::Index>(a)] *
                  reward(true, match, answer, ctx.truth, !match, cfg);
    }
    return expected;
  };

  double sum = 0.0;
  for (std::size_t i = 0; i < data.val_indices.size(); ++i) {
    const double bare = expected_reward(data.val_indices[i], i, false);
    if (cfg.validation_with_experience && store.size() > 0) {
      const double augmented = expected_reward(data.val_indices[i], i, true);
      sum += 0.5 * (bare + augmented);
    } else {
      sum += bare;
    }
  }
  return sum / static_cast<double>(data.val_indices.size());
}

TrainingTrace train(const TrainingData& data, const experience::Store& store,
                    ReferencePolicy& policy, const EvolutionConfig& cfg) {
  cfg.validate();
  policy.freeze_reference();

  TrainingTrace trace;
  double r_val = 0.0;

  for (int step = 0; step < cfg.training_steps; ++step) {
    if (step > 0 && cfg.validation_interval > 0 && step % cfg.validation_interval == 0)
      r_val = std::max(r_val, evaluate_validation(data, store, policy, cfg));

    const double eta = cfg.dynamic_eta ? eta_schedule(r_val, cfg) : cfg.fixed_eta;

    std::vector<RolloutGroup> batch;
    double reward_sum = 0.0;
    std::size_t reward_count = 0;
    for (int g = 0; g < cfg.batch_groups; ++g) {
      rng::SplitMix64 rng(rng::derive_seed(cfg.seed, 0xB00Cull + static_cast<std::uint64_t>(step),
                                           static_cast<std::uint64_t>(g)));
      const std::size_t task_index =
          data.train_indices[rng.uniform_index(data.train_indices.size())];
      const bool mask = rng.bernoulli(eta);
      batch.push_back(make_group(data, task_index, store, policy, mask, rng, cfg, false));

      std::vector<double> rewards;
      for (const auto& s : batch.back().samples) rewards.push_back(s.reward);
      const auto advantages = group_advantages(rewards, cfg.epsilon_stab);
      for (std::size_t j = 0; j < advantages.size(); ++j)
        batch.back().samples[j].advantage = advantages[j];
      for (double r : rewards) reward_sum += r;
      reward_count += rewards.size();
    }

    UpdateReport last{};
    for (int e = 0; e < std::max(1, cfg.inner_epochs); ++e) {
      last = policy_update(policy, batch, cfg);
      trace.reports.push_back(last);
    }

    TraceRow row;
    row.step = step;
    row.eta = eta;
    row.r_val = r_val;
    row.mean_reward = reward_count > 0 ? reward_sum / static_cast<double>(reward_count) : 0.0;
    row.mean_kl = last.mean_kl;
    row.clip_frac_exp = last.clip_frac_exp;
    row.clip_frac_std = last.clip_frac_std;
    row.grad_norm = last.grad_norm;
    trace.rows.push_back(row);
  }

  trace.final_r_val = evaluate_validation(data, store, policy, cfg);
  return trace;
}

}  // namespace sage::evolution
