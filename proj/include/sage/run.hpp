#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sage/evolution.hpp"
#include "sage/genesis.hpp"
#include "sage/io.hpp"
#include "sage/maze.hpp"
#include "sage/navigation.hpp"

namespace sage::cli {

/// Resolves an output directory against the SAGE_RUN_ROOT environment
/// variable (absolute paths pass through).
std::string resolve_out_dir(const std::string& dir);

struct GenesisOptions {
  std::vector<std::string> grid_files;
  int procedural = 0;  // number of generated mazes when no grid files given
  int maze_width = 64;
  int maze_height = 64;
  std::size_t n_tasks = 100;
  std::uint64_t seed = 7;
  std::string out_dir = "genesis_run";
  genesis::PipelineConfig pipeline{};
  maze::MazeConfig maze_cfg{};
};

/// genesis: grids -> tasks.jsonl, rules.json, rejection-statistics.json.
genesis::Dataset run_genesis(const GenesisOptions& options);

struct EvolveOptions {
  std::string data_dir;
  std::string out_dir = "evolve_run";
  double split = 0.9;  // train fraction
  evolution::EvolutionConfig cfg{};
};

/// evolve: dataset -> checkpoint.json, trace.csv, trace.svg.
evolution::TrainingTrace run_evolve(const EvolveOptions& options);

struct NavigateOptions {
  std::string data_dir;
  std::string checkpoint_path;         // used by the "checkpoint" policy
  std::string policy = "checkpoint";   // checkpoint | oracle | random | first-frontier
  std::string experience = "matched";  // matched | mismatched | none | random
  std::string mode = "both";           // qa | goal | both
  int episodes = 50;
  std::uint64_t seed = 0;
  std::string out_dir = "navigate_run";
  navigation::NavigationConfig nav{};
};

/// navigate: dataset + policy -> episodes.jsonl, metrics.csv.
std::vector<io::EpisodeRecord> run_navigate(const NavigateOptions& options);

/// eval: recompute metrics.csv from an existing episodes.jsonl.
void run_eval(const std::string& episodes_path, const std::string& metrics_out);

}  // namespace sage::cli
