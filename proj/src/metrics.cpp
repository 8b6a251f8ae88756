#include "sage/metrics.hpp"

#include <algorithm>

#include "sage/evolution.hpp"
#include "sage/experience.hpp"

namespace sage::metrics {

namespace {

std::string normalize(const std::string& s) {
  std::string out;
  for (const auto& token : experience::tokenize(s)) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

}  // namespace

JudgeScore ReferenceJudge::score(const std::string& answer, const std::string& truth) const {
  return reference_judge(answer, truth);
}

JudgeScore reference_judge(const std::string& answer, const std::string& truth) {
  if (!normalize(answer).empty() && normalize(answer) == normalize(truth)) return {5};
  const double f1 = evolution::rouge_l_f1(answer, truth);
  if (f1 >= 0.8) return {4};
  if (f1 >= 0.5) return {3};
  if (f1 >= 0.2) return {2};
  return {1};
}

double sr_llm(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyRecords("sr_llm: no records");
  double sum = 0.0;
  for (const auto& r : records) sum += (r.judge_raw - 1) / 4.0;
  return sum / static_cast<double>(records.size());
}

double spl_llm(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyRecords("spl_llm: no records");
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.failure) continue;
    if (r.shortest_m <= 0.0) throw std::invalid_argument("spl_llm: shortest path must be positive");
    sum += ((r.judge_raw - 1) / 4.0) * (r.shortest_m / std::max(r.traveled_m, r.shortest_m));
  }
  return sum / static_cast<double>(records.size());
}

GoalMetrics sr_spl_goal(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyRecords("sr_spl_goal: no records");
  GoalMetrics m;
  for (const auto& r : records) {
    if (!r.goal_success) continue;
    m.sr += 1.0;
    m.spl += r.shortest_m / std::max(r.traveled_m, r.shortest_m);
  }
  m.sr /= static_cast<double>(records.size());
  m.spl /= static_cast<double>(records.size());
  return m;
}

}  // namespace sage::metrics
