#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grepctx/pipeline.hpp"

namespace grepctx {

/// One line of the task JSONL:
/// {"task_id", "repo", "file", "line", "column", "local_context", "ground_truth"?}
struct TaskRecord {
  CompletionTask task;
  std::string repo;  // repository directory, relative to the eval repo root
};

inline TaskRecord parse_task_record(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("task_id") || !j.contains("local_context"))
    throw std::runtime_error("task record missing task_id/local_context: " + j.dump());
  TaskRecord rec;
  rec.task.task_id = j["task_id"].get<std::string>();
  rec.repo = j.value("repo", std::string{});
  rec.task.file = j.value("file", std::string{});
  rec.task.cursor_line = j.value("line", 0);
  rec.task.cursor_column = j.value("column", 0);
  rec.task.local_context = j["local_context"].get<std::string>();
  if (j.contains("ground_truth") && !j["ground_truth"].is_null())
    rec.task.ground_truth = j["ground_truth"].get<std::string>();
  rec.task.language = j.contains("language") ? language_from_name(j["language"].get<std::string>())
                                             : language_from_extension(rec.task.file);
  return rec;
}

inline std::vector<TaskRecord> load_task_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task file: " + path);
  std::vector<TaskRecord> tasks;
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    tasks.push_back(parse_task_record(nlohmann::json::parse(line)));
    if (!ids.insert(tasks.back().task.task_id).second)
      throw std::runtime_error("duplicate task_id: " + tasks.back().task.task_id);
  }
  return tasks;
}

/// Golden-context JSONL: {"task_id", "gold": [{"file", "start", "end"}]}
struct GoldEntry {
  std::string file;
  LineInterval interval;
};

inline std::map<std::string, std::vector<GoldEntry>> load_gold_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gold file: " + path);
  std::map<std::string, std::vector<GoldEntry>> gold;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    auto& entries = gold[j.at("task_id").get<std::string>()];
    for (const auto& g : j.at("gold")) {
      GoldEntry e;
      e.file = g.at("file").get<std::string>();
      e.interval = {g.at("start").get<int>(), g.at("end").get<int>()};
      entries.push_back(std::move(e));
    }
  }
  return gold;
}

/// Predictions JSONL: {"task_id", "prediction"}
inline std::map<std::string, std::string> load_predictions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictions file: " + path);
  std::map<std::string, std::string> preds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    preds[j.at("task_id").get<std::string>()] = j.at("prediction").get<std::string>();
  }
  return preds;
}

/// Key=value config file; keys mirror PipelineConfig field names exactly.
/// Lines starting with '#' and blank lines are ignored.
inline PipelineConfig load_config_file(const std::string& path, PipelineConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "mode") base.mode = pipeline_mode_from_name(value);
    else if (key == "m") base.m = std::stoi(value);
    else if (key == "top_k") base.top_k = std::stoi(value);
    else if (key == "budget") base.budget = std::stoi(value);
    else if (key == "top_percent") base.top_percent = std::stod(value);
    else if (key == "adjacency_gap") base.adjacency_gap = std::stoi(value);
    else if (key == "before") base.before = std::stoi(value);
    else if (key == "after") base.after = std::stoi(value);
    else if (key == "window_lines") base.window_lines = std::stoi(value);
    else if (key == "hit_cap") base.hit_cap = std::stoi(value);
    else if (key == "generator") base.generator = value;
    else if (key == "multiset_jaccard") base.multiset_jaccard = (value == "true" || value == "1");
    else if (key == "prompt_order")
      base.prompt_order = value == "relevance_last" ? PromptOrder::relevance_last
                                                    : PromptOrder::relevance_first;
    else
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key: " + key);
  }
  return base;
}

inline nlohmann::json context_pack_json(const ContextPack& pack) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : pack.blocks)
    blocks.push_back({{"file", b.file},
                      {"start", b.interval.start},
                      {"end", b.interval.end},
                      {"best_rank", b.best_rank},
                      {"score", b.score},
                      {"merged_from", b.merged_from},
                      {"text", b.text}});
  return {{"task_id", pack.task_id},
          {"blocks", blocks},
          {"token_count", pack.token_count},
          {"budget", pack.budget},
          {"rendered", pack.rendered}};
}

inline nlohmann::json latency_json(const LatencyRecord& rec) {
  nlohmann::json j = {{"task_id", rec.task_id},
                      {"retrieval_seconds", rec.retrieval_seconds},
                      {"cpu_seconds", rec.cpu_seconds},
                      {"phase_breakdown", rec.phase_breakdown}};
  if (rec.generation_seconds) j["generation_seconds"] = *rec.generation_seconds;
  return j;
}

}  // namespace grepctx
