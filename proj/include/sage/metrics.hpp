#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sage::metrics {

/// Raw judge verdict in [1, 5].
struct JudgeScore {
  int raw = 1;
};

struct EvalRecord {
  std::string episode_id;
  std::string category;
  int judge_raw = 1;          // QA episodes
  bool goal_success = false;  // goal-reaching episodes
  double shortest_m = 0.0;    // l
  double traveled_m = 0.0;    // p
  bool failure = false;       // navigation failure: SPL contribution forced to 0
};

struct EmptyRecords : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Judge contract; the reference implementation is a deterministic rubric.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual JudgeScore score(const std::string& answer, const std::string& truth) const = 0;
};

/// Rubric judge: 5 on normalized exact match, otherwise banded by Rouge-L F1
/// (>= 0.8 -> 4, >= 0.5 -> 3, >= 0.2 -> 2, else 1).
class ReferenceJudge : public Judge {
 public:
  JudgeScore score(const std::string& answer, const std::string& truth) const override;
};

JudgeScore reference_judge(const std::string& answer, const std::string& truth);

/// LLM-Match success rate: mean of (raw - 1) / 4.
double sr_llm(const std::vector<EvalRecord>& records);

/// Path-length weighted LLM-Match: mean of ((raw-1)/4) * (l / max(p, l));
/// failure-flagged records contribute 0.
double spl_llm(const std::vector<EvalRecord>& records);

/// Goal-reaching SR and SPL.
struct GoalMetrics {
  double sr = 0.0;
  double spl = 0.0;
};
GoalMetrics sr_spl_goal(const std::vector<EvalRecord>& records);

}  // namespace sage::metrics
