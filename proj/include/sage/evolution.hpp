#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sage/experience.hpp"
#include "sage/genesis.hpp"
#include "sage/rng.hpp"

namespace sage::evolution {

inline constexpr int kFeatureDim = 8;

/// Hyperparameters of the Evolution phase. Numeric defaults follow the
/// training configuration the pipeline was tuned with; the learning rate is
/// the reference-policy default (large-model training uses 1e-6).
struct EvolutionConfig {
  double w_format = 0.1;
  double w_accuracy = 1.0;
  double p_err = 0.5;
  bool p_err_always = false;  // if true, the penalty applies unconditionally
  double eta_init = 0.8;
  double eta_min = 0.0;
  double r_target = 1.5;
  double eps_std = 0.2;
  double eps_exp = 1.0;
  double beta_kl = 0.01;
  int group_size = 5;  // G rollouts per input
  double learning_rate = 1e-2;
  double gamma = 0.99;  // kept for the discounted objective; inert in bandit updates
  int validation_interval = 5;
  int training_steps = 150;
  int batch_groups = 8;
  int inner_epochs = 4;  // gradient passes per rollout batch; ratios drift off 1
  double temperature = 1.0;
  int frames = 4;
  int retrieval_k = 1;
  double epsilon_stab = 1e-8;
  bool dynamic_eta = true;
  double fixed_eta = 0.0;  // used when dynamic_eta is false
  double validation_fraction = 0.1;
  bool validation_with_experience = true;  // validate under deployment-style retrieval
  bool expose_gt_flag = false;  // diagnostic feature; collapses training when on
  std::uint64_t seed = 1;

  void validate() const {
    if (!(0.0 <= eta_min && eta_min <= eta_init && eta_init <= 1.0))
      throw std::invalid_argument("config: need 0 <= eta_min <= eta_init <= 1");
    if (!(0.0 < eps_std && eps_std <= eps_exp))
      throw std::invalid_argument("config: need 0 < eps_std <= eps_exp");
    if (group_size < 2) throw std::invalid_argument("config: group size must be >= 2");
    if (r_target <= 0.0) throw std::invalid_argument("config: r_target must be positive");
  }
};

/// Rouge-L F1 over lowercased whitespace tokens; 0 when either side is empty
/// or nothing is shared.
double rouge_l_f1(const std::string& candidate, const std::string& reference);

/// Shaped scalar reward: format compliance plus similarity-weighted accuracy
/// minus the error penalty.
double reward(bool format_ok, bool match_ok, const std::string& answer, const std::string& truth,
              bool error_flag, const EvolutionConfig& cfg);

/// Experience-injection probability from the best validation reward so far.
/// Clamped into [eta_min, eta_init] so it is always a valid Bernoulli rate.
double eta_schedule(double r_val, const EvolutionConfig& cfg);

/// One candidate observation offered to the policy.
struct Frame {
  int keypoint_order = 0;
  int view = 0;  // 0 forward, 1 left, 2 right
  bool is_ground_truth = false;
  double goal_distance_m = 0.0;  // remaining trajectory length from this keypoint
  double view_offset = 0.0;
  int object_count = 0;
  std::string text;  // label summary of the view
  Eigen::VectorXd text_embedding;
  std::vector<Cell> cells;
};

/// Rollout input: instruction, candidate frames, and (for augmented samples)
/// the retrieved experience.
struct Context {
  std::string task_id;
  std::string instruction;
  std::string truth;
  std::vector<Frame> frames;
  int gt_index = -1;
  bool has_experience = false;  // the Bernoulli mask m
  experience::RetrievedContext retrieved;
  Eigen::VectorXd experience_embedding;  // of the retrieved scene text; may be empty
  std::vector<double> novelty;           // per-frame share of cells unique to the frame
};

struct GroundTruthMissing : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Candidate frame pool for a task: the endpoint forward view plus
/// frames-1 other views of the same trajectory, sampled without replacement.
std::vector<Frame> make_frames(const genesis::TaskTuple& task,
                               const genesis::DatasetTrajectory& trajectory,
                               const genesis::SyntheticScene& scene, rng::SplitMix64& rng,
                               const EvolutionConfig& cfg);

/// Assembles the rollout context: shuffles the frames (the ground-truth
/// position varies), and injects retrieved experience when m = 1. The store
/// may be null; an augmented context over an empty store keeps an explicit
/// empty-experience marker.
Context build_context(const genesis::TaskTuple& task, std::vector<Frame> frames,
                      const experience::Store* store, bool mask, rng::SplitMix64& rng,
                      const EvolutionConfig& cfg);

/// Feature vector of one candidate frame within a context.
Eigen::VectorXd frame_features(const Context& ctx, std::size_t frame_index,
                               const EvolutionConfig& cfg);

/// Softmax policy over candidate feature rows, linear in a weight vector.
/// The frozen reference copy anchors the KL term.
class ReferencePolicy {
 public:
  explicit ReferencePolicy(int dim = kFeatureDim)
      : weights_(Eigen::VectorXd::Zero(dim)), ref_weights_(Eigen::VectorXd::Zero(dim)) {}

  int dim() const { return static_cast<int>(weights_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& ref_weights() const { return ref_weights_; }
  void set_weights(Eigen::VectorXd w) { weights_ = std::move(w); }
  void set_ref_weights(Eigen::VectorXd w) { ref_weights_ = std::move(w); }
  void freeze_reference() { ref_weights_ = weights_; }

  /// Action distribution over the rows of `features` at `temperature`.
  static Eigen::VectorXd probabilities(const Eigen::VectorXd& w, const Eigen::MatrixXd& features,
                                       double temperature);
  Eigen::VectorXd probabilities(const Eigen::MatrixXd& features, double temperature) const {
    return probabilities(weights_, features, temperature);
  }

  int sample(const Eigen::MatrixXd& features, double temperature, rng::SplitMix64& rng) const;
  int argmax(const Eigen::MatrixXd& features) const;
  double log_prob(const Eigen::MatrixXd& features, int action, double temperature) const;

 private:
  Eigen::VectorXd weights_;
  Eigen::VectorXd ref_weights_;
};

struct PolicySample {
  int action = 0;
  std::string answer;
  double old_log_prob = 0.0;
  double reward = 0.0;
  double advantage = 0.0;
};

struct RolloutGroup {
  Context context;
  Eigen::MatrixXd features;  // candidates x kFeatureDim
  std::vector<PolicySample> samples;
  bool mask = false;  // homogeneous across the group by construction
};

/// Group-standardized advantages: (r - mean) / (population std + stabilizer).
std::vector<double> group_advantages(const std::vector<double>& rewards, double epsilon_stab);

/// Clipped surrogate with the asymmetric trust region: the lower bound is
/// anchored at 1 - eps_std for every sample, the upper bound widens to
/// 1 + eps_exp for experience-augmented samples.
double aac_objective(double rho, double advantage, bool mask, const EvolutionConfig& cfg);

struct NonFiniteGradient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ObjectiveEval {
  double objective = 0.0;
  double mean_kl = 0.0;
  Eigen::VectorXd gradient;
  double clip_frac_exp = 0.0;  // clipped share among augmented samples
  double clip_frac_std = 0.0;  // clipped share among standard samples
  int clipped_above_aug = 0;   // augmented samples clipped at the upper bound
  int clipped_above_std = 0;
  int clipped_below = 0;
};

/// Mean AAC surrogate minus beta * KL(pi_theta || pi_ref), with its analytic
/// gradient, evaluated at weights `w` over the rollout batch.
ObjectiveEval evaluate_objective(const Eigen::VectorXd& w, const Eigen::VectorXd& w_ref,
                                 const std::vector<RolloutGroup>& batch,
                                 const EvolutionConfig& cfg);

struct UpdateReport {
  double mean_objective = 0.0;
  double mean_kl = 0.0;
  double grad_norm = 0.0;
  double clip_frac_exp = 0.0;
  double clip_frac_std = 0.0;
  int clipped_above_aug = 0;
  int clipped_above_std = 0;
  int clipped_below = 0;
};

/// One gradient-ascent step over the batch. Throws NonFiniteGradient (and
/// leaves the weights untouched) if the gradient degenerates.
UpdateReport policy_update(ReferencePolicy& policy, const std::vector<RolloutGroup>& batch,
                           const EvolutionConfig& cfg);

struct TraceRow {
  int step = 0;
  double eta = 0.0;
  double r_val = 0.0;
  double mean_reward = 0.0;
  double mean_kl = 0.0;
  double clip_frac_exp = 0.0;
  double clip_frac_std = 0.0;
  double grad_norm = 0.0;
};

struct TrainingTrace {
  std::vector<TraceRow> rows;
  double final_r_val = 0.0;
  std::vector<UpdateReport> reports;  // one per inner epoch, in step order
};

/// Task dataset split into train/validation partitions plus lookup tables.
/// `train_store` holds only the rules extracted from training-split tasks,
/// so validation retrieval cannot leak a validation task's own rules.
struct TrainingData {
  const genesis::Dataset* dataset = nullptr;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> val_indices;
  experience::Store train_store;
};

TrainingData split_dataset(const genesis::Dataset& dataset, const EvolutionConfig& cfg);

/// Full Evolution loop: seeded homogeneous-group rollouts under the hybrid
/// experience-injection schedule, AAC updates, and periodic validation that
/// drives the eta schedule.
TrainingTrace train(const TrainingData& data, const experience::Store& store,
                    ReferencePolicy& policy, const EvolutionConfig& cfg);

/// Mean greedy-policy validation reward (deployment-style contexts).
double evaluate_validation(const TrainingData& data, const experience::Store& store,
                           const ReferencePolicy& policy, const EvolutionConfig& cfg);

}  // namespace sage::evolution
