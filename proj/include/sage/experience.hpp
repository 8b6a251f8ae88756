#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace sage::experience {

inline constexpr int kDefaultEmbeddingDim = 64;

struct EmptyText : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DuplicateId : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PatternViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Lowercased alphanumeric tokens of `text`.
std::vector<std::string> tokenize(const std::string& text);

/// Deterministic feature-hashed bag-of-tokens embedding, L2-normalized.
/// Identical texts map to identical vectors.
Eigen::VectorXd embed(const std::string& text, int dim = kDefaultEmbeddingDim);

/// IF-AND-THEN navigation rule with its retrieval embedding.
struct ExperienceRule {
  std::string id;
  std::string task_text;
  std::string scene_text;
  std::string full_text;
  Eigen::VectorXd embedding;
  std::string trajectory_id;
};

/// True when `text` matches the canonical rule template
/// "IF answering|searching [..] AND observing [..] THEN prioritize this path."
bool matches_rule_pattern(const std::string& text);

/// Builds the canonical rule sentence from its parts.
std::string format_rule_text(const std::string& verb, const std::string& task_text,
                             const std::string& scene_text);

/// Constructs a rule with its embedding over task_text + scene_text.
ExperienceRule make_rule(std::string id, std::string task_text, std::string scene_text,
                         std::string full_text, std::string trajectory_id, int dim);

struct ScoredRule {
  ExperienceRule rule;
  double score = 0.0;
};

/// Retrieval result; scores are non-increasing and |rules| <= k.
struct RetrievedContext {
  std::vector<ScoredRule> rules;
  int k = 0;

  bool empty() const { return rules.empty(); }
  std::string joined_scene_text() const;
};

/// Exhaustive-scan vector store of experience rules. Reads may run
/// concurrently; writes are serialized and readers always observe a
/// consistent snapshot.
class Store {
 public:
  explicit Store(int dim = kDefaultEmbeddingDim) : dim_(dim) {}
  Store(const Store& other);
  Store& operator=(const Store& other);

  int dimension() const { return dim_; }
  std::size_t size() const;

  /// Inserts a rule; rejects duplicate ids and texts that fail the rule
  /// pattern. Returns the rule id.
  std::string insert(ExperienceRule rule);

  std::optional<ExperienceRule> get(const std::string& id) const;

  /// Top-k rules by cosine similarity against embed(query_task \n query_scene).
  /// Ties broken by insertion order. Empty store yields an empty context.
  RetrievedContext retrieve(const std::string& query_task, const std::string& query_scene,
                            int k) const;

  /// Mismatched-experience mode: among the top-2k rules by task-text
  /// similarity, returns the single rule minimizing scene-text similarity.
  RetrievedContext retrieve_mismatched(const std::string& query_task,
                                       const std::string& query_scene, int k) const;

  /// A uniformly random rule (or empty context when the store is empty).
  RetrievedContext retrieve_random(std::uint64_t rng_seed) const;

  std::vector<ExperienceRule> all_rules() const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static Store load(std::istream& in);
  static Store load_file(const std::string& path);

 private:
  int dim_;
  std::vector<ExperienceRule> rules_;
  mutable std::shared_mutex mutex_;
};

}  // namespace sage::experience
