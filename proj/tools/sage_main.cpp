#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sage/evolution.hpp"
#include "sage/run.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

void apply_config_file(CLI::App& app, std::string& config_path) {
  app.add_option("--config", config_path, "JSON config file; flags override its values");
}

// Generic: lets --config provide defaults before flags are parsed.
json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return json::parse(in);
}

template <typename T>
void from_config(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_eta(const std::string& value, sage::evolution::EvolutionConfig& cfg) {
  if (value == "dynamic") {
    cfg.dynamic_eta = true;
    return;
  }
  if (value.rfind("fixed:", 0) == 0) {
    cfg.dynamic_eta = false;
    cfg.fixed_eta = std::stod(value.substr(6));
    return;
  }
  throw CLI::ValidationError("--eta", "expected 'dynamic' or 'fixed:<value>'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sage: sandbox task synthesis, policy evolution, and navigation evaluation"};
  app.require_subcommand(1);

  sage::cli::GenesisOptions genesis_opts;
  std::string genesis_config;
  auto* genesis_cmd = app.add_subcommand("genesis", "synthesize tasks and experience rules");
  apply_config_file(*genesis_cmd, genesis_config);
  genesis_cmd->add_option("--grid", genesis_opts.grid_files, "grid file(s) to use");
  genesis_cmd->add_option("--procedural", genesis_opts.procedural,
                          "generate this many procedural mazes instead of loading grids");
  genesis_cmd->add_option("--maze-width", genesis_opts.maze_width, "procedural maze width");
  genesis_cmd->add_option("--maze-height", genesis_opts.maze_height, "procedural maze height");
  genesis_cmd->add_option("--n-tasks", genesis_opts.n_tasks, "number of accepted tasks");
  genesis_cmd->add_option("--seed", genesis_opts.seed, "master seed");
  genesis_cmd->add_option("--out", genesis_opts.out_dir, "output directory");
  genesis_cmd->add_option("--density", genesis_opts.pipeline.density, "object density");
  genesis_cmd->add_option("--delta", genesis_opts.pipeline.safety_delta_cells,
                          "safety threshold in cells");
  genesis_cmd->add_option("--max-length", genesis_opts.pipeline.max_trajectory_length_m,
                          "trajectory length filter in meters");

  sage::cli::EvolveOptions evolve_opts;
  std::string evolve_config;
  std::string eta_mode = "dynamic";
  auto* evolve_cmd = app.add_subcommand("evolve", "optimize the policy on a dataset");
  apply_config_file(*evolve_cmd, evolve_config);
  evolve_cmd->add_option("--data", evolve_opts.data_dir, "dataset directory")->required();
  evolve_cmd->add_option("--out", evolve_opts.out_dir, "output directory");
  evolve_cmd->add_option("--steps", evolve_opts.cfg.training_steps, "training steps");
  evolve_cmd->add_option("--seed", evolve_opts.cfg.seed, "training seed");
  evolve_cmd->add_option("--eta", eta_mode, "eta schedule: dynamic or fixed:<v>");
  evolve_cmd->add_option("--eps-exp", evolve_opts.cfg.eps_exp, "upper clip for augmented samples");
  evolve_cmd->add_option("--eps-std", evolve_opts.cfg.eps_std, "standard clip threshold");
  evolve_cmd->add_option("--lr", evolve_opts.cfg.learning_rate, "learning rate");
  evolve_cmd->add_option("--split", evolve_opts.split, "train fraction (rest validates)");
  evolve_cmd->add_option("--group-size", evolve_opts.cfg.group_size, "rollouts per group");
  evolve_cmd->add_option("--batch-groups", evolve_opts.cfg.batch_groups, "groups per step");
  evolve_cmd->add_option("--inner-epochs", evolve_opts.cfg.inner_epochs,
                         "gradient passes per rollout batch");

  sage::cli::NavigateOptions nav_opts;
  std::string nav_config;
  auto* nav_cmd = app.add_subcommand("navigate", "run navigation episodes");
  apply_config_file(*nav_cmd, nav_config);
  nav_cmd->add_option("--data", nav_opts.data_dir, "dataset directory")->required();
  nav_cmd->add_option("--checkpoint", nav_opts.checkpoint_path, "policy checkpoint");
  nav_cmd->add_option("--policy", nav_opts.policy,
                      "checkpoint | oracle | random | first-frontier");
  nav_cmd->add_option("--experience", nav_opts.experience,
                      "matched | mismatched | none | random");
  nav_cmd->add_option("--mode", nav_opts.mode, "qa | goal | both");
  nav_cmd->add_option("--episodes", nav_opts.episodes, "episode count");
  nav_cmd->add_option("--seed", nav_opts.seed, "episode seed");
  nav_cmd->add_option("--out", nav_opts.out_dir, "output directory");
  nav_cmd->add_option("--t-max", nav_opts.nav.t_max, "step budget");

  std::string eval_episodes, eval_out = "metrics.csv";
  auto* eval_cmd = app.add_subcommand("eval", "recompute metrics from episodes.jsonl");
  eval_cmd->add_option("--episodes", eval_episodes, "episodes.jsonl path")->required();
  eval_cmd->add_option("--out", eval_out, "metrics.csv output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*genesis_cmd) {
      const json cfg = load_config(genesis_config);
      from_config(cfg, "n_tasks", genesis_opts.n_tasks);
      from_config(cfg, "seed", genesis_opts.seed);
      from_config(cfg, "procedural", genesis_opts.procedural);
      from_config(cfg, "density", genesis_opts.pipeline.density);
      sage::cli::run_genesis(genesis_opts);
    } else if (*evolve_cmd) {
      const json cfg = load_config(evolve_config);
      from_config(cfg, "steps", evolve_opts.cfg.training_steps);
      from_config(cfg, "seed", evolve_opts.cfg.seed);
      from_config(cfg, "eps_exp", evolve_opts.cfg.eps_exp);
      parse_eta(eta_mode, evolve_opts.cfg);
      sage::cli::run_evolve(evolve_opts);
    } else if (*nav_cmd) {
      const json cfg = load_config(nav_config);
      from_config(cfg, "episodes", nav_opts.episodes);
      from_config(cfg, "seed", nav_opts.seed);
      sage::cli::run_navigate(nav_opts);
    } else if (*eval_cmd) {
      sage::cli::run_eval(eval_episodes, eval_out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sage::evolution::NonFiniteGradient& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
