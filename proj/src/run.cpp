#include "sage/run.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>

#include <json.hpp>

namespace sage::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_out_dir(const std::string& dir) {
  if (fs::path(dir).is_absolute()) return dir;
  if (const char* root = std::getenv("SAGE_RUN_ROOT"); root != nullptr && *root != '\0')
    return (fs::path(root) / dir).string();
  return dir;
}

genesis::Dataset run_genesis(const GenesisOptions& options) {
  std::vector<genesis::GridInstance> grids;
  if (!options.grid_files.empty()) {
    for (const auto& path : options.grid_files) {
      genesis::GridInstance inst;
      inst.id = fs::path(path).stem().string();
      inst.grid = load_grid_file(path);
      grids.push_back(std::move(inst));
    }
  } else {
    const int count = std::max(1, options.procedural);
    for (int i = 0; i < count; ++i) {
      genesis::GridInstance inst;
      inst.id = "maze_" + std::to_string(i);
      inst.grid = maze::generate_maze(options.maze_width, options.maze_height,
                                      rng::derive_seed(options.seed, 0x3A2Eull, i),
                                      options.maze_cfg);
      grids.push_back(std::move(inst));
    }
  }

  genesis::TemplateSynthesizer synth;
  genesis::Dataset dataset =
      genesis::generate_dataset(grids, options.n_tasks, options.seed, options.pipeline, synth);

  const std::string dir = resolve_out_dir(options.out_dir);
  fs::create_directories(dir);
  io::save_dataset(dataset, grids, dir);

  json cfg;
  cfg["command"] = "genesis";
  cfg["n_tasks"] = options.n_tasks;
  cfg["seed"] = options.seed;
  cfg["grids"] = json::array();
  for (const auto& g : grids) cfg["grids"].push_back(g.id);
  cfg["density"] = options.pipeline.density;
  cfg["safety_delta_cells"] = options.pipeline.safety_delta_cells;
  cfg["max_trajectory_length_m"] = options.pipeline.max_trajectory_length_m;
  cfg["embedding_dim"] = options.pipeline.embedding_dim;
  io::write_text_file((fs::path(dir) / "run_config.json").string(), cfg.dump(1) + "\n");
  return dataset;
}

evolution::TrainingTrace run_evolve(const EvolveOptions& options) {
  io::LoadedDataset loaded = io::load_dataset(options.data_dir);

  evolution::EvolutionConfig cfg = options.cfg;
  cfg.validation_fraction = 1.0 - options.split;
  cfg.validate();

  evolution::TrainingData data = evolution::split_dataset(loaded.dataset, cfg);
  evolution::ReferencePolicy policy;
  evolution::TrainingTrace trace = evolution::train(data, data.train_store, policy, cfg);

  const std::string dir = resolve_out_dir(options.out_dir);
  fs::create_directories(dir);

  io::Checkpoint ckpt;
  ckpt.weights = policy.weights();
  ckpt.ref_weights = policy.ref_weights();
  ckpt.step = cfg.training_steps;
  ckpt.cfg_hash = io::config_hash(cfg);
  io::save_checkpoint(ckpt, (fs::path(dir) / "checkpoint.json").string());
  io::save_trace_csv(trace, (fs::path(dir) / "trace.csv").string());
  io::save_trace_svg(trace, (fs::path(dir) / "trace.svg").string());

  json jcfg;
  jcfg["command"] = "evolve";
  jcfg["data_dir"] = options.data_dir;
  jcfg["split"] = options.split;
  jcfg["cfg_hash"] = ckpt.cfg_hash;
  jcfg["eta"] = cfg.dynamic_eta ? std::string("dynamic")
                                : ("fixed:" + io::format_double(cfg.fixed_eta));
  jcfg["eps_exp"] = cfg.eps_exp;
  jcfg["eps_std"] = cfg.eps_std;
  jcfg["steps"] = cfg.training_steps;
  jcfg["seed"] = cfg.seed;
  jcfg["final_validation_reward"] = trace.final_r_val;
  io::write_text_file((fs::path(dir) / "run_config.json").string(), jcfg.dump(1) + "\n");
  return trace;
}

std::vector<io::EpisodeRecord> run_navigate(const NavigateOptions& options) {
  io::LoadedDataset loaded = io::load_dataset(options.data_dir);
  const genesis::Dataset& dataset = loaded.dataset;
  if (dataset.tasks.empty() && options.episodes > 0)
    throw std::runtime_error("run_navigate: dataset has no tasks");

  evolution::ReferencePolicy policy;
  if (options.policy == "checkpoint") {
    if (options.checkpoint_path.empty())
      throw std::runtime_error("run_navigate: checkpoint policy requires --checkpoint");
    const io::Checkpoint ckpt = io::load_checkpoint(options.checkpoint_path);
    policy.set_weights(ckpt.weights);
    policy.set_ref_weights(ckpt.ref_weights);
  }

  auto grid_of = [&](const std::string& grid_id) -> const OccupancyGrid& {
    for (const auto& g : loaded.grids)
      if (g.id == grid_id) return g.grid;
    throw std::runtime_error("run_navigate: unknown grid " + grid_id);
  };
  auto scene_of = [&](const std::string& grid_id) -> const genesis::SyntheticScene& {
    for (const auto& s : dataset.scenes)
      if (s.grid_id == grid_id) return s;
    throw std::runtime_error("run_navigate: no scene for grid " + grid_id);
  };

  navigation::NavigationConfig nav = options.nav;
  if (options.experience == "matched")
    nav.mode = navigation::NavigationConfig::ExperienceMode::Matched;
  else if (options.experience == "mismatched")
    nav.mode = navigation::NavigationConfig::ExperienceMode::Mismatched;
  else if (options.experience == "none")
    nav.mode = navigation::NavigationConfig::ExperienceMode::None;
  else if (options.experience == "random")
    nav.mode = navigation::NavigationConfig::ExperienceMode::Random;
  else
    throw std::runtime_error("run_navigate: unknown experience mode " + options.experience);

  std::vector<std::string> modes;
  if (options.mode == "both") modes = {"qa", "goal"};
  else if (options.mode == "qa" || options.mode == "goal") modes = {options.mode};
  else throw std::runtime_error("run_navigate: unknown mode " + options.mode);

  metrics::ReferenceJudge judge;
  std::vector<io::EpisodeRecord> episodes;
  for (int e = 0; e < options.episodes; ++e) {
    const std::size_t ti = static_cast<std::size_t>(e) % dataset.tasks.size();
    const genesis::TaskTuple& task = dataset.tasks[ti];
    const genesis::DatasetTrajectory& traj = dataset.trajectories[ti];
    const OccupancyGrid& grid = grid_of(traj.grid_id);
    const genesis::SyntheticScene& scene = scene_of(traj.grid_id);
    const Pose start = traj.trajectory.waypoints.front();

    for (const std::string& mode : modes) {
      navigation::NavigationConfig ep_nav = nav;
      ep_nav.seed = rng::derive_seed(options.seed, static_cast<std::uint64_t>(e),
                                     mode == "qa" ? 0ull : 1ull);

      std::unique_ptr<navigation::ActionScorer> scorer;
      if (options.policy == "checkpoint")
        scorer = std::make_unique<navigation::PolicyScorer>(policy);
      else if (options.policy == "oracle")
        scorer = std::make_unique<navigation::OracleScorer>(grid, task.target_cell,
                                                            task.target_label);
      else if (options.policy == "random")
        scorer = std::make_unique<navigation::RandomScorer>(ep_nav.seed);
      else if (options.policy == "first-frontier")
        scorer = std::make_unique<navigation::FirstFrontierScorer>();
      else
        throw std::runtime_error("run_navigate: unknown policy " + options.policy);

      const navigation::EpisodeMode em = mode == "qa"
                                             ? navigation::EpisodeMode::QuestionAnswering
                                             : navigation::EpisodeMode::GoalReaching;
      io::EpisodeRecord rec;
      rec.result = navigation::run_episode(task, grid, scene, *scorer, dataset.store, start,
                                           ep_nav, em);
      // Degenerate start-on-target episodes keep a one-cell floor so the
      // path-weighted metrics stay defined.
      rec.result.shortest_m = std::max(rec.result.shortest_m, grid.resolution());
      char buf[32];
      std::snprintf(buf, sizeof(buf), "ep_%06d_%s", e, mode.c_str());
      rec.id = buf;
      rec.task_id = task.id;
      rec.category = genesis::to_string(task.category);
      rec.mode = mode;
      rec.truth = task.ground_truth.answer_text;
      if (mode == "qa") {
        rec.failure = rec.result.outcome != navigation::EpisodeOutcome::AnsweredFromMemory;
        if (rec.failure && rec.result.answer_text.empty()) rec.result.answer_text = "Unknown.";
        rec.judge_raw = judge.score(rec.result.answer_text, rec.truth).raw;
      } else {
        rec.failure = rec.result.outcome != navigation::EpisodeOutcome::ReachedTarget;
        rec.judge_raw = 1;
      }
      episodes.push_back(std::move(rec));
    }
  }

  const std::string dir = resolve_out_dir(options.out_dir);
  fs::create_directories(dir);
  io::save_episodes_jsonl(episodes, (fs::path(dir) / "episodes.jsonl").string());
  io::save_metrics_csv(episodes, (fs::path(dir) / "metrics.csv").string());

  json jcfg;
  jcfg["command"] = "navigate";
  jcfg["data_dir"] = options.data_dir;
  jcfg["policy"] = options.policy;
  jcfg["experience"] = options.experience;
  jcfg["mode"] = options.mode;
  jcfg["episodes"] = options.episodes;
  jcfg["seed"] = options.seed;
  jcfg["t_max"] = nav.t_max;
  jcfg["delta_max"] = nav.delta_max;
  jcfg["proximity"] = nav.proximity;
  io::write_text_file((fs::path(dir) / "run_config.json").string(), jcfg.dump(1) + "\n");
  return episodes;
}

void run_eval(const std::string& episodes_path, const std::string& metrics_out) {
  const auto episodes = io::load_episodes_jsonl(episodes_path);
  io::save_metrics_csv(episodes, metrics_out);
}

}  // namespace sage::cli
