#include "sage/experience.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "sage/rng.hpp"

namespace sage::experience {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

const std::regex& rule_regex() {
  static const std::regex re(
      R"(^IF (answering|searching) \[[^\[\]]+\] AND observing \[[^\[\]]+\] THEN prioritize this path\.$)");
  return re;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    // Light plural folding so "pianos" in a question matches the "piano"
    // label in a scene description.
    if (cur.size() > 3 && cur.back() == 's' && cur[cur.size() - 2] != 's') cur.pop_back();
    tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Eigen::VectorXd embed(const std::string& text, int dim) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw EmptyText("embed: text has no tokens");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (const auto& tok : tokens) v[static_cast<Eigen::Index>(fnv1a(tok) % dim)] += 1.0;
  return v / v.norm();
}

bool matches_rule_pattern(const std::string& text) {
  return std::regex_match(text, rule_regex());
}

std::string format_rule_text(const std::string& verb, const std::string& task_text,
                             const std::string& scene_text) {
  return "IF " + verb + " [" + task_text + "] AND observing [" + scene_text +
         "] THEN prioritize this path.";
}

ExperienceRule make_rule(std::string id, std::string task_text, std::string scene_text,
                         std::string full_text, std::string trajectory_id, int dim) {
  ExperienceRule rule;
  rule.id = std::move(id);
  rule.task_text = std::move(task_text);
  rule.scene_text = std::move(scene_text);
  rule.full_text = std::move(full_text);
  rule.trajectory_id = std::move(trajectory_id);
  rule.embedding = embed(rule.task_text + "\n" + rule.scene_text, dim);
  return rule;
}

std::string RetrievedContext::joined_scene_text() const {
  std::string out;
  for (const auto& sr : rules) {
    if (!out.empty()) out += " ";
    out += sr.rule.scene_text;
  }
  return out;
}

Store::Store(const Store& other) {
  std::shared_lock lock(other.mutex_);
  dim_ = other.dim_;
  rules_ = other.rules_;
}

Store& Store::operator=(const Store& other) {
  if (this == &other) return *this;
  std::vector<ExperienceRule> copy;
  int dim;
  {
    std::shared_lock lock(other.mutex_);
    copy = other.rules_;
    dim = other.dim_;
  }
  std::unique_lock lock(mutex_);
  rules_ = std::move(copy);
  dim_ = dim;
  return *this;
}

std::size_t Store::size() const {
  std::shared_lock lock(mutex_);
  return rules_.size();
}

std::string Store::insert(ExperienceRule rule) {
  if (!matches_rule_pattern(rule.full_text))
    throw PatternViolation("insert: rule text does not match the IF-AND-THEN template: " +
                           rule.full_text);
  if (rule.embedding.size() != dim_)
    throw std::invalid_argument("insert: embedding dimension mismatch");
  std::unique_lock lock(mutex_);
  for (const auto& r : rules_)
    if (r.id == rule.id) throw DuplicateId("insert: duplicate rule id " + rule.id);
  rules_.push_back(std::move(rule));
  return rules_.back().id;
}

std::optional<ExperienceRule> Store::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  for (const auto& r : rules_)
    if (r.id == id) return r;
  return std::nullopt;
}

RetrievedContext Store::retrieve(const std::string& query_task, const std::string& query_scene,
                                 int k) const {
  if (k < 1) throw std::invalid_argument("retrieve: k must be >= 1");
  RetrievedContext ctx;
  ctx.k = k;
  std::shared_lock lock(mutex_);
  if (rules_.empty()) return ctx;

  const Eigen::VectorXd q = embed(query_task + "\n" + query_scene, dim_);
  std::vector<std::pair<double, std::size_t>> scored(rules_.size());
  for (std::size_t i = 0; i < rules_.size(); ++i)
    scored[i] = {q.dot(rules_[i].embedding), i};
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::size_t take = std::min<std::size_t>(k, scored.size());
  for (std::size_t i = 0; i < take; ++i)
    ctx.rules.push_back({rules_[scored[i].second], scored[i].first});
  return ctx;
}

RetrievedContext Store::retrieve_mismatched(const std::string& query_task,
                                            const std::string& query_scene, int k) const {
  if (k < 1) throw std::invalid_argument("retrieve_mismatched: k must be >= 1");
  RetrievedContext ctx;
  ctx.k = 1;
  std::shared_lock lock(mutex_);
  if (rules_.empty()) return ctx;

  const Eigen::VectorXd q_task = embed(query_task, dim_);
  std::vector<std::pair<double, std::size_t>> by_task(rules_.size());
  for (std::size_t i = 0; i < rules_.size(); ++i)
    by_task[i] = {q_task.dot(embed(rules_[i].task_text, dim_)), i};
  std::stable_sort(by_task.begin(), by_task.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  by_task.resize(std::min<std::size_t>(2 * static_cast<std::size_t>(k), by_task.size()));

  // Surface-matching candidates narrowed to the semantically divergent one.
  const Eigen::VectorXd q_scene = embed(query_scene, dim_);
  std::size_t best = by_task.front().second;
  double best_scene = std::numeric_limits<double>::infinity();
  for (const auto& [score, idx] : by_task) {
    const double s = q_scene.dot(embed(rules_[idx].scene_text, dim_));
    if (s < best_scene) {
      best_scene = s;
      best = idx;
    }
  }
  const Eigen::VectorXd q = embed(query_task + "\n" + query_scene, dim_);
  ctx.rules.push_back({rules_[best], q.dot(rules_[best].embedding)});
  return ctx;
}

RetrievedContext Store::retrieve_random(std::uint64_t rng_seed) const {
  RetrievedContext ctx;
  ctx.k = 1;
  std::shared_lock lock(mutex_);
  if (rules_.empty()) return ctx;
  rng::SplitMix64 rng(rng_seed);
  const std::size_t idx = rng.uniform_index(rules_.size());
  ctx.rules.push_back({rules_[idx], 0.0});
  return ctx;
}

std::vector<ExperienceRule> Store::all_rules() const {
  std::shared_lock lock(mutex_);
  return rules_;
}

void Store::save(std::ostream& out) const {
  nlohmann::json j;
  std::shared_lock lock(mutex_);
  j["dimension"] = dim_;
  j["rules"] = nlohmann::json::array();
  for (const auto& r : rules_) {
    nlohmann::json jr;
    jr["id"] = r.id;
    jr["task_text"] = r.task_text;
    jr["scene_text"] = r.scene_text;
    jr["full_text"] = r.full_text;
    jr["trajectory_id"] = r.trajectory_id;
    jr["embedding"] = std::vector<double>(r.embedding.data(), r.embedding.data() + r.embedding.size());
    j["rules"].push_back(std::move(jr));
  }
  out << j.dump(1) << '\n';
}

void Store::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write store file: " + path);
  save(out);
}

Store Store::load(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  Store store(j.at("dimension").get<int>());
  for (const auto& jr : j.at("rules")) {
    ExperienceRule r;
    r.id = jr.at("id").get<std::string>();
    r.task_text = jr.at("task_text").get<std::string>();
    r.scene_text = jr.at("scene_text").get<std::string>();
    r.full_text = jr.at("full_text").get<std::string>();
    r.trajectory_id = jr.at("trajectory_id").get<std::string>();
    const auto emb = jr.at("embedding").get<std::vector<double>>();
    r.embedding = Eigen::Map<const Eigen::VectorXd>(emb.data(), static_cast<Eigen::Index>(emb.size()));
    store.insert(std::move(r));
  }
  return store;
}

Store Store::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open store file: " + path);
  return load(in);
}

}  // namespace sage::experience
