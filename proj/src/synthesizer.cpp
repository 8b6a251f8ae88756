#include "sage/synthesizer.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "sage/rng.hpp"

namespace sage::genesis {

namespace {

const char* kCategoryNames[kCategoryCount] = {
    "ObjectRecognition",  "ObjectLocalization",   "AttributeRecognition",
    "ObjectStateRecognition", "Counting",         "WorldKnowledge",
    "SpatialUnderstanding",   "FunctionalReasoning",
};

const std::map<std::string, std::string>& kind_map() {
  static const std::map<std::string, std::string> kinds = {
      {"couch", "furniture"},  {"bed", "furniture"},      {"table", "furniture"},
      {"chair", "furniture"},  {"bench", "furniture"},    {"cabinet", "furniture"},
      {"toaster", "appliance"}, {"television", "appliance"}, {"lamp", "appliance"},
      {"sink", "fixture"},     {"mirror", "decor"},       {"vase", "decor"},
      {"rug", "decor"},        {"plant", "greenery"},     {"piano", "instrument"},
      {"book", "reading material"},
  };
  return kinds;
}

const std::map<std::string, std::string>& function_map() {
  static const std::map<std::string, std::string> functions = {
      {"couch", "sitting and relaxing"}, {"bed", "sleeping"},
      {"chair", "sitting"},              {"table", "placing items"},
      {"lamp", "lighting the room"},     {"sink", "washing hands"},
      {"piano", "playing music"},        {"book", "reading"},
      {"television", "watching shows"},  {"bench", "sitting"},
      {"mirror", "checking your reflection"}, {"rug", "covering the floor"},
      {"toaster", "toasting bread"},     {"plant", "freshening the air"},
      {"vase", "holding flowers"},       {"cabinet", "storing items"},
  };
  return functions;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string article(const std::string& noun) {
  if (noun.empty()) return "a";
  switch (std::tolower(static_cast<unsigned char>(noun[0]))) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
    default: return "a";
  }
}

std::string count_word(std::size_t n) {
  static const char* words[] = {"zero", "one", "two",   "three", "four",
                                "five", "six", "seven", "eight", "nine"};
  if (n < 10) return words[n];
  return std::to_string(n);
}

std::string relation_phrase(Relation r) {
  switch (r) {
    case Relation::LeftOf: return "to the left of";
    case Relation::RightOf: return "to the right of";
    case Relation::Near: return "near";
    case Relation::Above: return "above";
    case Relation::Below: return "below";
    case Relation::InRoom: return "in the same room as";
  }
  return "near";
}

// Attaches a 4-way multiple choice block to the question. `pool` supplies
// distractors; the correct text is always among the options.
void attach_options(SynthesisResult& result, const std::string& correct,
                    std::vector<std::string> pool, rng::SplitMix64& rng) {
  std::vector<std::string> distractors;
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  pool.erase(std::remove(pool.begin(), pool.end(), correct), pool.end());
  rng.shuffle(pool);
  for (const auto& p : pool) {
    if (distractors.size() == 3) break;
    distractors.push_back(p);
  }
  if (distractors.size() < 3) return;  // not enough material; stay open-ended

  result.format = AnswerFormat::MultipleChoice;
  result.options = {correct, distractors[0], distractors[1], distractors[2]};
  rng.shuffle(result.options);
  result.correct_option = static_cast<int>(
      std::find(result.options.begin(), result.options.end(), correct) - result.options.begin());
}

}  // namespace

const char* to_string(TaskCategory c) { return kCategoryNames[static_cast<int>(c)]; }

TaskCategory category_from_string(const std::string& s) {
  for (int i = 0; i < kCategoryCount; ++i)
    if (s == kCategoryNames[i]) return static_cast<TaskCategory>(i);
  throw std::invalid_argument("unknown task category: " + s);
}

std::string kind_of(const std::string& label) {
  const auto it = kind_map().find(label);
  return it != kind_map().end() ? it->second : std::string();
}

std::string function_of(const std::string& label) {
  const auto it = function_map().find(label);
  return it != function_map().end() ? it->second : std::string();
}

std::string describe_object(const SceneObject& object) {
  std::string text;
  if (const auto color = object.attributes.find("color"); color != object.attributes.end())
    text += color->second + " ";
  text += object.label;
  if (const auto state = object.attributes.find("state"); state != object.attributes.end())
    text += ", " + state->second;
  if (const std::string kind = kind_of(object.label); !kind.empty()) text += ", " + kind;
  if (const std::string fn = function_of(object.label); !fn.empty()) text += " for " + fn;
  return text;
}

SynthesisResult TemplateSynthesizer::synthesize(const SynthesisRequest& request) const {
  const SyntheticScene& scene = *request.scene;
  const std::vector<int>& candidates = request.visible_objects;
  if (candidates.empty()) return SynthesisResult::refuse("no visible objects");

  rng::SplitMix64 rng(request.seed);
  SynthesisResult result;
  const SceneObject& picked = scene.object(
      candidates[rng.uniform_index(candidates.size())]);
  result.target_object = picked.id;

  std::vector<std::string> label_pool;
  for (const auto& obj : scene.objects) label_pool.push_back(obj.label);

  switch (request.category) {
    case TaskCategory::ObjectRecognition: {
      const auto color = picked.attributes.find("color");
      result.question = color != picked.attributes.end()
                            ? "What is the " + color->second + " object seen directly ahead?"
                            : "What is the object seen directly ahead?";
      result.answer = capitalize(article(picked.label)) + " " + picked.label + ".";
      if (rng.bernoulli(multiple_choice_fraction_))
        attach_options(result, picked.label, label_pool, rng);
      break;
    }
    case TaskCategory::ObjectLocalization: {
      result.question = "Where is the " + picked.label + " located?";
      result.answer = "The " + picked.label + " is directly ahead.";
      for (const auto& triple : scene.graph) {
        if (triple.subject != picked.id || triple.relation == Relation::Near) continue;
        if (!std::binary_search(candidates.begin(), candidates.end(), triple.object)) continue;
        result.answer = "The " + picked.label + " is " + relation_phrase(triple.relation) +
                        " the " + scene.object(triple.object).label + ".";
        break;
      }
      break;
    }
    case TaskCategory::AttributeRecognition: {
      const auto color = picked.attributes.find("color");
      if (color == picked.attributes.end())
        return SynthesisResult::refuse("picked object has no color attribute");
      result.question = "What color is the " + picked.label + " ahead?";
      result.answer = capitalize(color->second) + ".";
      break;
    }
    case TaskCategory::ObjectStateRecognition: {
      const SceneObject* target = nullptr;
      for (int id : candidates) {
        if (scene.object(id).attributes.count("state")) {
          target = &scene.object(id);
          break;
        }
      }
      if (!target) return SynthesisResult::refuse("no stateful object in view");
      result.target_object = target->id;
      const std::string& state = target->attributes.at("state");
      const std::string other = state == "open" ? "closed"
                                : state == "closed" ? "open"
                                : state == "on" ? "off" : "on";
      result.question = "Is the " + target->label + " currently " + state + " or " + other + "?";
      result.answer = "The " + target->label + " is " + state + ".";
      break;
    }
    case TaskCategory::Counting: {
      std::size_t n = 0;
      for (int id : candidates)
        if (scene.object(id).label == picked.label) ++n;
      result.question = "How many " + picked.label + "s are visible from here?";
      result.answer = capitalize(count_word(n)) + ".";
      if (rng.bernoulli(multiple_choice_fraction_)) {
        std::vector<std::string> pool;
        for (std::size_t k = 0; k <= n + 3; ++k) pool.push_back(capitalize(count_word(k)) + ".");
        attach_options(result, result.answer, pool, rng);
      }
      break;
    }
    case TaskCategory::WorldKnowledge: {
      const SceneObject* target = nullptr;
      for (int id : candidates) {
        if (kind_map().count(scene.object(id).label)) {
          target = &scene.object(id);
          break;
        }
      }
      if (!target) return SynthesisResult::refuse("no object with a known kind in view");
      result.target_object = target->id;
      result.question = "Which piece of " + kind_map().at(target->label) +
                        " can be seen from here?";
      result.answer = capitalize(article(target->label)) + " " + target->label + " is visible.";
      break;
    }
    case TaskCategory::SpatialUnderstanding: {
      std::vector<const SceneTriple*> lateral;
      for (const auto& triple : scene.graph) {
        if (triple.relation == Relation::Near || triple.relation == Relation::InRoom) continue;
        if (std::binary_search(candidates.begin(), candidates.end(), triple.subject) &&
            std::binary_search(candidates.begin(), candidates.end(), triple.object))
          lateral.push_back(&triple);
      }
      if (lateral.empty()) return SynthesisResult::refuse("no lateral relation between visible objects");
      const SceneTriple& t = *lateral[rng.uniform_index(lateral.size())];
      const SceneObject& a = scene.object(t.subject);
      const SceneObject& b = scene.object(t.object);
      result.target_object = a.id;
      result.question = "What is the relative position of the " + a.label + " and the " +
                        b.label + "?";
      result.answer = "The " + a.label + " is " + relation_phrase(t.relation) + " the " +
                      b.label + ".";
      break;
    }
    case TaskCategory::FunctionalReasoning: {
      const SceneObject* target = nullptr;
      for (int id : candidates) {
        if (function_map().count(scene.object(id).label)) {
          target = &scene.object(id);
          break;
        }
      }
      if (!target) return SynthesisResult::refuse("no object with a known function in view");
      result.target_object = target->id;
      result.question = "Which object here is used for " + function_map().at(target->label) + "?";
      result.answer = "The " + target->label + ".";
      break;
    }
  }
  return result;
}

}  // namespace sage::genesis
