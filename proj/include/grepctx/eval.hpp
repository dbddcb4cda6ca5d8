#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grepctx/io.hpp"
#include "grepctx/metrics.hpp"
#include "grepctx/pipeline.hpp"

namespace grepctx {

struct TaskResult {
  std::string task_id;
  bool errored = false;
  std::string error;
  bool retrieval_empty = false;
  std::optional<EvalMetrics> metrics;
  std::optional<CoverageReport> pool_coverage;
  std::optional<CoverageReport> topk_coverage;
  std::optional<FailureClass> failure_class;
  LatencyRecord latency;
};

struct EvalSummary {
  int tasks = 0;
  int errored = 0;
  int retrieval_empty = 0;
  int covered = 0;
  int recall_failures = 0;
  int rerank_failures = 0;
  std::optional<EvalMetrics> mean_metrics;
  double mean_retrieval_seconds = 0.0;
  double mean_generation_seconds = 0.0;
};

struct EvalRun {
  std::vector<TaskResult> results;  // task order
  EvalSummary summary;
};

/// Runs the retrieval side of the pipeline over a task file. Snapshots are
/// scanned once per distinct repo within the run (no state survives the run).
inline EvalRun run_eval(const std::filesystem::path& repo_root,
                        const std::vector<TaskRecord>& tasks, const PipelineConfig& cfg,
                        const std::map<std::string, std::vector<GoldEntry>>& gold = {},
                        const std::map<std::string, std::string>& predictions = {},
                        double tau = 0.8, const QueryGenerator& external_generator = {}) {
  EvalRun run;
  std::map<std::string, RepoSnapshot> snapshots;

  for (const auto& rec : tasks) {
    TaskResult tr;
    tr.task_id = rec.task.task_id;
    tr.latency.task_id = rec.task.task_id;
    try {
      std::filesystem::path repo_dir = repo_root / rec.repo;
      auto it = snapshots.find(rec.repo);
      if (it == snapshots.end())
        it = snapshots.emplace(rec.repo, scan_repo(repo_dir)).first;
      const RepoSnapshot& snap = it->second;

      RetrievalResult res = run_retrieval(snap, rec.task, cfg, external_generator);
      tr.latency = res.latency;
      tr.retrieval_empty = res.retrieval_empty;

      auto gold_it = gold.find(rec.task.task_id);
      if (gold_it != gold.end()) {
        std::set<std::pair<std::string, int>> gold_lines;
        for (const auto& g : gold_it->second)
          for (int l = g.interval.start; l <= g.interval.end; ++l) gold_lines.emplace(g.file, l);
        double pool_cov = coverage_ratio(lines_of(res.pool), gold_lines);
        double topk_cov = coverage_ratio(lines_of(res.pack.blocks), gold_lines);
        tr.pool_coverage = make_coverage_report(pool_cov, tau);
        tr.topk_coverage = make_coverage_report(topk_cov, tau);
        tr.failure_class = classify_failure(pool_cov, topk_cov, tau);
      }

      auto pred_it = predictions.find(rec.task.task_id);
      if (pred_it != predictions.end() && rec.task.ground_truth) {
        EvalMetrics m;
        const std::string& p = pred_it->second;
        const std::string& r = *rec.task.ground_truth;
        m.code_em = exact_match(p, r);
        m.code_es = edit_similarity(p, r);
        std::tie(m.code_recall, m.code_f1) = token_recall_f1(p, r);
        auto idm = identifier_metrics(p, r, rec.task.language);
        m.id_em = idm.em;
        m.id_es = idm.es;
        m.id_recall = idm.recall;
        m.id_f1 = idm.f1;
        tr.metrics = m;
      }
    } catch (const std::exception& e) {
      tr.errored = true;
      tr.error = e.what();
    }
    run.results.push_back(std::move(tr));
  }

  auto& s = run.summary;
  s.tasks = static_cast<int>(run.results.size());
  EvalMetrics acc;
  int with_metrics = 0;
  for (const auto& tr : run.results) {
    if (tr.errored) ++s.errored;
    if (tr.retrieval_empty) ++s.retrieval_empty;
    if (tr.topk_coverage && tr.topk_coverage->covered) ++s.covered;
    if (tr.failure_class == FailureClass::recall_failure) ++s.recall_failures;
    if (tr.failure_class == FailureClass::rerank_failure) ++s.rerank_failures;
    s.mean_retrieval_seconds += tr.latency.retrieval_seconds;
    s.mean_generation_seconds += tr.latency.generation_seconds.value_or(0.0);
    if (tr.metrics) {
      ++with_metrics;
      acc.code_em += tr.metrics->code_em;
      acc.code_es += tr.metrics->code_es;
      acc.code_recall += tr.metrics->code_recall;
      acc.code_f1 += tr.metrics->code_f1;
      acc.id_em += tr.metrics->id_em;
      acc.id_es += tr.metrics->id_es;
      acc.id_recall += tr.metrics->id_recall;
      acc.id_f1 += tr.metrics->id_f1;
    }
  }
  if (s.tasks > 0) {
    s.mean_retrieval_seconds /= s.tasks;
    s.mean_generation_seconds /= s.tasks;
  }
  if (with_metrics > 0) {
    acc.code_em /= with_metrics;
    acc.code_es /= with_metrics;
    acc.code_recall /= with_metrics;
    acc.code_f1 /= with_metrics;
    acc.id_em /= with_metrics;
    acc.id_es /= with_metrics;
    acc.id_recall /= with_metrics;
    acc.id_f1 /= with_metrics;
    s.mean_metrics = acc;
  }
  return run;
}

/// Deterministic per-task results line. Latency is intentionally absent here
/// (it varies run to run); it goes to the separate latency JSONL.
inline nlohmann::json task_result_json(const TaskResult& tr) {
  nlohmann::json j = {{"task_id", tr.task_id},
                      {"errored", tr.errored},
                      {"retrieval_empty", tr.retrieval_empty}};
  if (tr.errored) j["error"] = tr.error;
  if (tr.pool_coverage)
    j["pool_coverage"] = {{"ratio", tr.pool_coverage->ratio},
                          {"tau", tr.pool_coverage->tau},
                          {"covered", tr.pool_coverage->covered}};
  if (tr.topk_coverage)
    j["topk_coverage"] = {{"ratio", tr.topk_coverage->ratio},
                          {"tau", tr.topk_coverage->tau},
                          {"covered", tr.topk_coverage->covered}};
  j["failure_class"] =
      tr.failure_class ? nlohmann::json(failure_class_name(*tr.failure_class)) : nlohmann::json();
  if (tr.metrics)
    j["metrics"] = {{"code_em", tr.metrics->code_em},       {"code_es", tr.metrics->code_es},
                    {"code_recall", tr.metrics->code_recall}, {"code_f1", tr.metrics->code_f1},
                    {"id_em", tr.metrics->id_em},           {"id_es", tr.metrics->id_es},
                    {"id_recall", tr.metrics->id_recall},   {"id_f1", tr.metrics->id_f1}};
  return j;
}

inline nlohmann::json summary_json(const EvalSummary& s) {
  nlohmann::json j = {{"tasks", s.tasks},
                      {"errored", s.errored},
                      {"retrieval_empty", s.retrieval_empty},
                      {"covered", s.covered},
                      {"recall_failures", s.recall_failures},
                      {"rerank_failures", s.rerank_failures},
                      {"mean_retrieval_seconds", s.mean_retrieval_seconds},
                      {"mean_generation_seconds", s.mean_generation_seconds}};
  if (s.mean_metrics)
    j["metrics"] = {{"code_em", s.mean_metrics->code_em},
                    {"code_es", s.mean_metrics->code_es},
                    {"code_recall", s.mean_metrics->code_recall},
                    {"code_f1", s.mean_metrics->code_f1},
                    {"id_em", s.mean_metrics->id_em},
                    {"id_es", s.mean_metrics->id_es},
                    {"id_recall", s.mean_metrics->id_recall},
                    {"id_f1", s.mean_metrics->id_f1}};
  return j;
}

struct SweepRow {
  double value = 0.0;
  EvalSummary summary;
};

enum class SweepParam { top_percent, tau, top_k };

inline SweepParam sweep_param_from_name(const std::string& name) {
  if (name == "N" || name == "top_percent") return SweepParam::top_percent;
  if (name == "tau") return SweepParam::tau;
  if (name == "K" || name == "top_k") return SweepParam::top_k;
  throw std::invalid_argument("unknown sweep parameter: " + name);
}

/// Re-runs the evaluation once per parameter value; one summary row each.
inline std::vector<SweepRow> run_sweep(const std::filesystem::path& repo_root,
                                       const std::vector<TaskRecord>& tasks,
                                       PipelineConfig cfg, SweepParam param,
                                       const std::vector<double>& values,
                                       const std::map<std::string, std::vector<GoldEntry>>& gold = {},
                                       double tau = 0.8) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    PipelineConfig c = cfg;
    double t = tau;
    switch (param) {
      case SweepParam::top_percent:
        if (v <= 0 || v > 100) throw std::invalid_argument("N out of range (0,100]");
        c.top_percent = v;
        break;
      case SweepParam::tau:
        if (v < 0 || v > 1) throw std::invalid_argument("tau out of range [0,1]");
        t = v;
        break;
      case SweepParam::top_k:
        if (v < 1) throw std::invalid_argument("K must be >= 1");
        c.top_k = static_cast<int>(v);
        break;
    }
    rows.push_back({v, run_eval(repo_root, tasks, c, gold, {}, t).summary});
  }
  return rows;
}

}  // namespace grepctx
