#include "sage/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sage::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  // Shortest representation that round-trips; matches the JSON writer.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double parsed = 0.0;
  std::sscanf(buf, "%lf", &parsed);
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    std::sscanf(shorter, "%lf", &parsed);
    if (parsed == v) return shorter;
  }
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json pose_json(const Pose& p) { return json::array({p.x, p.y, p.theta}); }
Pose pose_from(const json& j) { return Pose{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}; }

json cell_json(const Cell& c) { return json::array({c.x, c.y}); }
Cell cell_from(const json& j) { return Cell{j[0].get<int>(), j[1].get<int>()}; }

json view_json(const planner::ViewDescriptor& v) {
  json j;
  j["offset"] = v.view_offset;
  j["cells"] = json::array();
  for (const Cell& c : v.cells) j["cells"].push_back(cell_json(c));
  j["objects"] = v.object_ids;
  return j;
}

planner::ViewDescriptor view_from(const json& j) {
  planner::ViewDescriptor v;
  v.view_offset = j.at("offset").get<double>();
  for (const auto& jc : j.at("cells")) v.cells.push_back(cell_from(jc));
  v.object_ids = j.at("objects").get<std::vector<int>>();
  return v;
}

std::string format_name(genesis::AnswerFormat f) {
  return f == genesis::AnswerFormat::MultipleChoice ? "multiple_choice" : "open_ended";
}

genesis::AnswerFormat format_from(const std::string& s) {
  return s == "multiple_choice" ? genesis::AnswerFormat::MultipleChoice
                                : genesis::AnswerFormat::OpenEnded;
}

genesis::Relation relation_from(const std::string& s) {
  using genesis::Relation;
  if (s == "left_of") return Relation::LeftOf;
  if (s == "right_of") return Relation::RightOf;
  if (s == "near") return Relation::Near;
  if (s == "above") return Relation::Above;
  if (s == "below") return Relation::Below;
  if (s == "in_room") return Relation::InRoom;
  throw std::runtime_error("unknown relation: " + s);
}

}  // namespace

void save_dataset(const genesis::Dataset& dataset, const std::vector<genesis::GridInstance>& grids,
                  const std::string& dir) {
  fs::create_directories(fs::path(dir) / "grids");

  for (const auto& g : grids)
    save_grid_file(g.grid, (fs::path(dir) / "grids" / (g.id + ".grid")).string());

  {
    std::ofstream out(fs::path(dir) / "scenes.jsonl", std::ios::binary);
    for (const auto& scene : dataset.scenes) {
      json j;
      j["grid_id"] = scene.grid_id;
      j["objects"] = json::array();
      for (const auto& obj : scene.objects) {
        json jo;
        jo["id"] = obj.id;
        jo["label"] = obj.label;
        jo["cell"] = cell_json(obj.cell);
        jo["attributes"] = obj.attributes;
        j["objects"].push_back(std::move(jo));
      }
      j["graph"] = json::array();
      for (const auto& t : scene.graph)
        j["graph"].push_back(json::array({t.subject, genesis::to_string(t.relation), t.object}));
      out << j.dump() << '\n';
    }
  }

  {
    std::ofstream out(fs::path(dir) / "trajectories.jsonl", std::ios::binary);
    for (const auto& dt : dataset.trajectories) {
      json j;
      j["id"] = dt.id;
      j["scene"] = dt.grid_id;
      j["waypoints"] = json::array();
      for (const auto& p : dt.trajectory.waypoints) j["waypoints"].push_back(pose_json(p));
      j["cells"] = json::array();
      for (const Cell& c : dt.trajectory.cells) j["cells"].push_back(cell_json(c));
      j["length_m"] = dt.trajectory.length_m;
      j["exact"] = json::array({dt.trajectory.exact.straight, dt.trajectory.exact.diag});
      j["keypoints"] = dt.keypoint_indices;
      j["triplets"] = json::array();
      for (const auto& trip : dt.triplets) {
        json jt;
        jt["order"] = trip.keypoint_order;
        jt["waypoint_index"] = trip.waypoint_index;
        jt["pose"] = pose_json(trip.pose);
        jt["forward"] = view_json(trip.forward);
        jt["left"] = view_json(trip.left);
        jt["right"] = view_json(trip.right);
        j["triplets"].push_back(std::move(jt));
      }
      out << j.dump() << '\n';
    }
  }

  {
    std::ofstream out(fs::path(dir) / "tasks.jsonl", std::ios::binary);
    for (std::size_t i = 0; i < dataset.tasks.size(); ++i) {
      const auto& t = dataset.tasks[i];
      const auto& prov = dataset.provenance[i];
      json j;
      j["id"] = t.id;
      j["instruction"] = t.instruction;
      j["question"] = t.question;
      j["category"] = genesis::to_string(t.category);
      j["trajectory_id"] = t.trajectory_id;
      j["ground_truth"] = {{"answer_text", t.ground_truth.answer_text},
                           {"forward_observation", t.ground_truth.forward_observation}};
      j["knowledge"] = t.knowledge;
      j["format"] = format_name(t.format);
      j["options"] = t.options;
      j["correct_option"] = t.correct_option;
      j["target"] = {{"cell", cell_json(t.target_cell)}, {"label", t.target_label}};
      j["provenance"] = {{"grid_id", prov.grid_id},
                         {"master_seed", prov.master_seed},
                         {"stage_seeds",
                          {{"endpoints", prov.endpoints_seed},
                           {"discretize", prov.discretize_seed},
                           {"synthesis", prov.synthesis_seed}}}};
      out << j.dump() << '\n';
    }
  }

  dataset.store.save_file((fs::path(dir) / "rules.json").string());

  {
    json j;
    j["attempted"] = dataset.attempts;
    j["accepted"] = dataset.tasks.size();
    j["master_seed"] = dataset.master_seed;
    j["rejected"] = json::object();
    std::size_t rejected_total = 0;
    for (const auto& [reason, count] : dataset.rejection_counts) {
      j["rejected"][reason] = count;
      rejected_total += count;
    }
    j["rejected_total"] = rejected_total;
    write_text_file((fs::path(dir) / "rejection-statistics.json").string(), j.dump(1) + "\n");
  }
}

LoadedDataset load_dataset(const std::string& dir) {
  LoadedDataset out;
  out.dataset.store = experience::Store::load_file((fs::path(dir) / "rules.json").string());

  std::map<std::string, std::size_t> scene_by_grid;
  {
    std::ifstream in(fs::path(dir) / "scenes.jsonl", std::ios::binary);
    if (!in) throw std::runtime_error("load_dataset: missing scenes.jsonl in " + dir);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      genesis::SyntheticScene scene;
      scene.grid_id = j.at("grid_id").get<std::string>();
      for (const auto& jo : j.at("objects")) {
        genesis::SceneObject obj;
        obj.id = jo.at("id").get<int>();
        obj.label = jo.at("label").get<std::string>();
        obj.cell = cell_from(jo.at("cell"));
        obj.attributes = jo.at("attributes").get<std::map<std::string, std::string>>();
        scene.objects.push_back(std::move(obj));
      }
      for (const auto& jt : j.at("graph"))
        scene.graph.push_back({jt[0].get<int>(), relation_from(jt[1].get<std::string>()),
                               jt[2].get<int>()});
      scene_by_grid[scene.grid_id] = out.dataset.scenes.size();
      out.dataset.scenes.push_back(std::move(scene));
    }
  }

  for (const auto& [grid_id, idx] : scene_by_grid) {
    (void)idx;
    genesis::GridInstance inst;
    inst.id = grid_id;
    inst.grid = load_grid_file((fs::path(dir) / "grids" / (grid_id + ".grid")).string());
    out.grids.push_back(std::move(inst));
  }

  std::map<std::string, genesis::DatasetTrajectory> trajectories;
  {
    std::ifstream in(fs::path(dir) / "trajectories.jsonl", std::ios::binary);
    if (!in) throw std::runtime_error("load_dataset: missing trajectories.jsonl in " + dir);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      genesis::DatasetTrajectory dt;
      dt.id = j.at("id").get<std::string>();
      dt.grid_id = j.at("scene").get<std::string>();
      for (const auto& jp : j.at("waypoints")) dt.trajectory.waypoints.push_back(pose_from(jp));
      for (const auto& jc : j.at("cells")) dt.trajectory.cells.push_back(cell_from(jc));
      dt.trajectory.length_m = j.at("length_m").get<double>();
      dt.trajectory.exact = {j.at("exact")[0].get<std::int64_t>(),
                             j.at("exact")[1].get<std::int64_t>()};
      dt.keypoint_indices = j.at("keypoints").get<std::vector<int>>();
      for (const auto& jt : j.at("triplets")) {
        planner::ObservationTriplet trip;
        trip.keypoint_order = jt.at("order").get<int>();
        trip.waypoint_index = jt.at("waypoint_index").get<int>();
        trip.pose = pose_from(jt.at("pose"));
        trip.forward = view_from(jt.at("forward"));
        trip.left = view_from(jt.at("left"));
        trip.right = view_from(jt.at("right"));
        dt.triplets.push_back(std::move(trip));
      }
      trajectories[dt.id] = std::move(dt);
    }
  }

  {
    std::ifstream in(fs::path(dir) / "tasks.jsonl", std::ios::binary);
    if (!in) throw std::runtime_error("load_dataset: missing tasks.jsonl in " + dir);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      genesis::TaskTuple t;
      t.id = j.at("id").get<std::string>();
      t.instruction = j.at("instruction").get<std::string>();
      t.question = j.at("question").get<std::string>();
      t.category = genesis::category_from_string(j.at("category").get<std::string>());
      t.trajectory_id = j.at("trajectory_id").get<std::string>();
      t.ground_truth.answer_text = j.at("ground_truth").at("answer_text").get<std::string>();
      t.ground_truth.forward_observation =
          j.at("ground_truth").at("forward_observation").get<int>();
      t.knowledge = j.at("knowledge").get<std::vector<std::string>>();
      t.format = format_from(j.at("format").get<std::string>());
      t.options = j.at("options").get<std::vector<std::string>>();
      t.correct_option = j.at("correct_option").get<int>();
      t.target_cell = cell_from(j.at("target").at("cell"));
      t.target_label = j.at("target").at("label").get<std::string>();

      genesis::TaskProvenance prov;
      prov.grid_id = j.at("provenance").at("grid_id").get<std::string>();
      prov.master_seed = j.at("provenance").at("master_seed").get<std::uint64_t>();
      prov.endpoints_seed = j.at("provenance").at("stage_seeds").at("endpoints").get<std::uint64_t>();
      prov.discretize_seed =
          j.at("provenance").at("stage_seeds").at("discretize").get<std::uint64_t>();
      prov.synthesis_seed =
          j.at("provenance").at("stage_seeds").at("synthesis").get<std::uint64_t>();

      auto it = trajectories.find(t.trajectory_id);
      if (it == trajectories.end())
        throw std::runtime_error("load_dataset: task references unknown trajectory " +
                                 t.trajectory_id);
      out.dataset.trajectories.push_back(it->second);
      out.dataset.tasks.push_back(std::move(t));
      out.dataset.provenance.push_back(std::move(prov));
      out.dataset.master_seed = prov.master_seed;
    }
  }
  return out;
}

std::string config_hash(const evolution::EvolutionConfig& cfg) {
  json j;
  j["w_format"] = cfg.w_format;
  j["w_accuracy"] = cfg.w_accuracy;
  j["p_err"] = cfg.p_err;
  j["p_err_always"] = cfg.p_err_always;
  j["eta_init"] = cfg.eta_init;
  j["eta_min"] = cfg.eta_min;
  j["r_target"] = cfg.r_target;
  j["eps_std"] = cfg.eps_std;
  j["eps_exp"] = cfg.eps_exp;
  j["beta_kl"] = cfg.beta_kl;
  j["group_size"] = cfg.group_size;
  j["learning_rate"] = cfg.learning_rate;
  j["gamma"] = cfg.gamma;
  j["validation_interval"] = cfg.validation_interval;
  j["training_steps"] = cfg.training_steps;
  j["batch_groups"] = cfg.batch_groups;
  j["inner_epochs"] = cfg.inner_epochs;
  j["temperature"] = cfg.temperature;
  j["frames"] = cfg.frames;
  j["retrieval_k"] = cfg.retrieval_k;
  j["epsilon_stab"] = cfg.epsilon_stab;
  j["dynamic_eta"] = cfg.dynamic_eta;
  j["fixed_eta"] = cfg.fixed_eta;
  j["validation_fraction"] = cfg.validation_fraction;
  j["validation_with_experience"] = cfg.validation_with_experience;
  j["expose_gt_flag"] = cfg.expose_gt_flag;
  j["seed"] = cfg.seed;

  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json j;
  j["w"] = std::vector<double>(ckpt.weights.data(), ckpt.weights.data() + ckpt.weights.size());
  j["w_ref"] =
      std::vector<double>(ckpt.ref_weights.data(), ckpt.ref_weights.data() + ckpt.ref_weights.size());
  j["step"] = ckpt.step;
  j["cfg_hash"] = ckpt.cfg_hash;
  write_text_file(path, j.dump(1) + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
  const json j = json::parse(read_text_file(path));
  Checkpoint ckpt;
  const auto w = j.at("w").get<std::vector<double>>();
  const auto wr = j.at("w_ref").get<std::vector<double>>();
  ckpt.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  ckpt.ref_weights =
      Eigen::Map<const Eigen::VectorXd>(wr.data(), static_cast<Eigen::Index>(wr.size()));
  ckpt.step = j.at("step").get<int>();
  ckpt.cfg_hash = j.at("cfg_hash").get<std::string>();
  return ckpt;
}

void save_trace_csv(const evolution::TrainingTrace& trace, const std::string& path) {
  std::ostringstream out;
  out << "step,eta,r_val,mean_reward,mean_kl,clip_frac_exp,clip_frac_std,grad_norm\n";
  for (const auto& row : trace.rows) {
    out << row.step << ',' << format_double(row.eta) << ',' << format_double(row.r_val) << ','
        << format_double(row.mean_reward) << ',' << format_double(row.mean_kl) << ','
        << format_double(row.clip_frac_exp) << ',' << format_double(row.clip_frac_std) << ','
        << format_double(row.grad_norm) << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<evolution::TraceRow> load_trace_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::getline(in, line);  // header
  std::vector<evolution::TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    evolution::TraceRow row;
    std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &row.step, &row.eta, &row.r_val,
                &row.mean_reward, &row.mean_kl, &row.clip_frac_exp, &row.clip_frac_std,
                &row.grad_norm);
    rows.push_back(row);
  }
  return rows;
}

void save_trace_svg(const evolution::TrainingTrace& trace, const std::string& path) {
  const int width = 720, height = 360, margin = 48;
  const double plot_w = width - 2.0 * margin, plot_h = height - 2.0 * margin;
  const std::size_t n = trace.rows.size();

  double max_reward = 1e-9, min_reward = 0.0;
  for (const auto& row : trace.rows) {
    max_reward = std::max(max_reward, row.mean_reward);
    min_reward = std::min(min_reward, row.mean_reward);
  }
  const double span = std::max(1e-9, max_reward - min_reward);

  auto x_of = [&](std::size_t i) {
    return margin + (n > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
  };
  auto y_reward = [&](double v) { return margin + plot_h * (1.0 - (v - min_reward) / span); };
  auto y_eta = [&](double v) { return margin + plot_h * (1.0 - v); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";

  auto polyline = [&](const char* color, auto y_fn, auto value_fn) {
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i)
      svg << format_double(x_of(i)) << ',' << format_double(y_fn(value_fn(trace.rows[i]))) << ' ';
    svg << "\"/>\n";
  };
  if (n > 0) {
    polyline("steelblue", y_reward, [](const evolution::TraceRow& r) { return r.mean_reward; });
    polyline("firebrick", y_eta, [](const evolution::TraceRow& r) { return r.eta; });
  }
  svg << "<text x=\"" << margin << "\" y=\"" << margin - 12
      << "\" font-family=\"monospace\" font-size=\"12\">mean reward (blue), eta (red) vs step"
      << "</text>\n";
  svg << "</svg>\n";
  write_text_file(path, svg.str());
}

void save_episodes_jsonl(const std::vector<EpisodeRecord>& episodes, const std::string& path) {
  std::ostringstream out;
  for (const auto& ep : episodes) {
    json j;
    j["id"] = ep.id;
    j["task_id"] = ep.task_id;
    j["category"] = ep.category;
    j["mode"] = ep.mode;
    j["outcome"] = navigation::to_string(ep.result.outcome);
    j["answer"] = ep.result.answer_text;
    j["truth"] = ep.truth;
    j["judge_raw"] = ep.judge_raw;
    j["goal_success"] = ep.result.goal_success;
    j["steps"] = ep.result.steps;
    j["path_m"] = ep.result.path_m;
    j["shortest_m"] = ep.result.shortest_m;
    j["failure"] = ep.failure;
    j["final_pose"] = pose_json(ep.result.final_pose);
    j["trace"] = json::array();
    for (const auto& step : ep.result.trace) {
      json js;
      js["t"] = step.t;
      js["pose"] = pose_json(step.pose);
      js["kind"] = step.action_kind;
      js["target"] = step.action_target;
      js["rules"] = step.retrieved_rule_ids;
      js["traveled"] = step.traveled;
      j["trace"].push_back(std::move(js));
    }
    out << j.dump() << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<EpisodeRecord> load_episodes_jsonl(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<EpisodeRecord> episodes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    EpisodeRecord ep;
    ep.id = j.at("id").get<std::string>();
    ep.task_id = j.at("task_id").get<std::string>();
    ep.category = j.at("category").get<std::string>();
    ep.mode = j.at("mode").get<std::string>();
    const std::string outcome = j.at("outcome").get<std::string>();
    if (outcome == "answered_from_memory")
      ep.result.outcome = navigation::EpisodeOutcome::AnsweredFromMemory;
    else if (outcome == "reached_target")
      ep.result.outcome = navigation::EpisodeOutcome::ReachedTarget;
    else if (outcome == "step_budget_exhausted")
      ep.result.outcome = navigation::EpisodeOutcome::StepBudgetExhausted;
    else
      ep.result.outcome = navigation::EpisodeOutcome::InvalidDecision;
    ep.result.answer_text = j.at("answer").get<std::string>();
    ep.truth = j.at("truth").get<std::string>();
    ep.judge_raw = j.at("judge_raw").get<int>();
    ep.result.goal_success = j.at("goal_success").get<bool>();
    ep.result.steps = j.at("steps").get<int>();
    ep.result.path_m = j.at("path_m").get<double>();
    ep.result.shortest_m = j.at("shortest_m").get<double>();
    ep.failure = j.at("failure").get<bool>();
    ep.result.final_pose = pose_from(j.at("final_pose"));
    for (const auto& js : j.at("trace")) {
      navigation::StepRecord step;
      step.t = js.at("t").get<int>();
      step.pose = pose_from(js.at("pose"));
      step.action_kind = js.at("kind").get<std::string>();
      step.action_target = js.at("target").get<std::string>();
      step.retrieved_rule_ids = js.at("rules").get<std::vector<std::string>>();
      step.traveled = js.at("traveled").get<double>();
      ep.result.trace.push_back(std::move(step));
    }
    episodes.push_back(std::move(ep));
  }
  return episodes;
}

std::vector<metrics::EvalRecord> to_eval_records(const std::vector<EpisodeRecord>& episodes,
                                                 const std::string& mode) {
  std::vector<metrics::EvalRecord> records;
  for (const auto& ep : episodes) {
    if (ep.mode != mode) continue;
    metrics::EvalRecord r;
    r.episode_id = ep.id;
    r.category = ep.category;
    r.judge_raw = ep.judge_raw;
    r.goal_success = ep.result.goal_success;
    r.shortest_m = ep.result.shortest_m;
    r.traveled_m = ep.result.path_m;
    r.failure = ep.failure;
    records.push_back(std::move(r));
  }
  return records;
}

void save_metrics_csv(const std::vector<EpisodeRecord>& episodes, const std::string& path) {
  std::set<std::string> categories;
  for (const auto& ep : episodes) categories.insert(ep.category);

  auto row_for = [&](const std::string& label, auto pred) -> std::string {
    std::vector<metrics::EvalRecord> qa, goal;
    for (const auto& ep : episodes) {
      if (!pred(ep)) continue;
      metrics::EvalRecord r;
      r.episode_id = ep.id;
      r.category = ep.category;
      r.judge_raw = ep.judge_raw;
      r.goal_success = ep.result.goal_success;
      r.shortest_m = ep.result.shortest_m;
      r.traveled_m = ep.result.path_m;
      r.failure = ep.failure;
      (ep.mode == "qa" ? qa : goal).push_back(std::move(r));
    }
    const metrics::GoalMetrics gm =
        goal.empty() ? metrics::GoalMetrics{} : metrics::sr_spl_goal(goal);
    const double sr_d = qa.empty() ? 0.0 : metrics::sr_llm(qa);
    const double spl_d = qa.empty() ? 0.0 : metrics::spl_llm(qa);
    return label + "," + format_double(gm.sr) + "," + format_double(gm.spl) + "," +
           format_double(sr_d) + "," + format_double(spl_d) + "\n";
  };

  std::string out = "category,sr,spl,sr_dagger,spl_dagger\n";
  for (const auto& cat : categories)
    out += row_for(cat, [&](const EpisodeRecord& ep) { return ep.category == cat; });
  out += row_for("overall", [](const EpisodeRecord&) { return true; });
  write_text_file(path, out);
}

}  // namespace sage::io
