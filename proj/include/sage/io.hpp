#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sage/evolution.hpp"
#include "sage/genesis.hpp"
#include "sage/metrics.hpp"
#include "sage/navigation.hpp"

namespace sage::io {

/// Locale-independent shortest-round-trip formatting for doubles, shared by
/// every writer so re-runs and recomputations are byte-comparable.
std::string format_double(double v);

/// Dataset directory layout:
///   grids/<id>.grid  scenes.jsonl  trajectories.jsonl  tasks.jsonl
///   rules.json  rejection-statistics.json
void save_dataset(const genesis::Dataset& dataset, const std::vector<genesis::GridInstance>& grids,
                  const std::string& dir);

struct LoadedDataset {
  genesis::Dataset dataset;
  std::vector<genesis::GridInstance> grids;
};
LoadedDataset load_dataset(const std::string& dir);

struct Checkpoint {
  Eigen::VectorXd weights;
  Eigen::VectorXd ref_weights;
  int step = 0;
  std::string cfg_hash;
};
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Stable hash of the resolved configuration, recorded in checkpoints.
std::string config_hash(const evolution::EvolutionConfig& cfg);

void save_trace_csv(const evolution::TrainingTrace& trace, const std::string& path);
std::vector<evolution::TraceRow> load_trace_csv(const std::string& path);

/// Self-contained SVG line chart of reward and eta against training step.
void save_trace_svg(const evolution::TrainingTrace& trace, const std::string& path);

struct EpisodeRecord {
  std::string id;
  std::string task_id;
  std::string category;
  std::string mode;  // "qa" | "goal"
  navigation::EpisodeResult result;
  std::string truth;
  int judge_raw = 1;
  bool failure = false;
};

void save_episodes_jsonl(const std::vector<EpisodeRecord>& episodes, const std::string& path);
std::vector<EpisodeRecord> load_episodes_jsonl(const std::string& path);

/// Per-category metric table (rows: categories plus "overall"); columns
/// category, sr, spl, sr_dagger, spl_dagger.
void save_metrics_csv(const std::vector<EpisodeRecord>& episodes, const std::string& path);

/// Eval records grouped from episode records for the metrics module.
std::vector<metrics::EvalRecord> to_eval_records(const std::vector<EpisodeRecord>& episodes,
                                                 const std::string& mode);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace sage::io
