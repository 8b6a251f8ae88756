#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sage/planner.hpp"
#include "sage/scene.hpp"

namespace sage::genesis {

enum class TaskCategory {
  ObjectRecognition,
  ObjectLocalization,
  AttributeRecognition,
  ObjectStateRecognition,
  Counting,
  WorldKnowledge,
  SpatialUnderstanding,
  FunctionalReasoning,
};

inline constexpr int kCategoryCount = 8;

const char* to_string(TaskCategory c);
TaskCategory category_from_string(const std::string& s);

/// World-knowledge vocabulary shared by the synthesizer, the answerer, and
/// observation descriptors. Empty string for unknown labels.
std::string kind_of(const std::string& label);
std::string function_of(const std::string& label);

/// One-line description of an observed object: label plus color, state, and
/// world-knowledge vocabulary, e.g. "red toaster, off, appliance for
/// toasting bread".
std::string describe_object(const SceneObject& object);

enum class AnswerFormat { OpenEnded, MultipleChoice };

struct SynthesisRequest {
  const SyntheticScene* scene = nullptr;
  const planner::ViewDescriptor* forward = nullptr;  // endpoint forward view
  std::vector<int> visible_objects;                  // non-wall objects in the view
  TaskCategory category = TaskCategory::ObjectRecognition;
  std::uint64_t seed = 0;
};

struct SynthesisResult {
  bool refused = false;
  std::string refusal_reason;
  std::string question;  // bare question text, ends with '?'
  std::string answer;    // declarative answer, ends with '.'
  AnswerFormat format = AnswerFormat::OpenEnded;
  std::vector<std::string> options;  // 4 entries when multiple choice
  int correct_option = -1;
  int target_object = -1;  // scene object the answer refers to

  static SynthesisResult refuse(std::string reason) {
    SynthesisResult r;
    r.refused = true;
    r.refusal_reason = std::move(reason);
    return r;
  }
};

/// Question/answer generator contract: deterministic for fixed inputs and
/// seed. The reference implementation is template-based; model-backed
/// synthesizers can be plugged in behind this interface.
class TaskSynthesizer {
 public:
  virtual ~TaskSynthesizer() = default;
  virtual SynthesisResult synthesize(const SynthesisRequest& request) const = 0;
};

/// Deterministic per-category question/answer templates over the visible
/// objects and scene-graph triples of the endpoint view.
class TemplateSynthesizer : public TaskSynthesizer {
 public:
  explicit TemplateSynthesizer(double multiple_choice_fraction = 0.35)
      : multiple_choice_fraction_(multiple_choice_fraction) {}

  SynthesisResult synthesize(const SynthesisRequest& request) const override;

 private:
  double multiple_choice_fraction_;
};

}  // namespace sage::genesis
