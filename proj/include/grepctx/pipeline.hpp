#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grepctx/assemble.hpp"
#include "grepctx/fuse.hpp"
#include "grepctx/metrics.hpp"
#include "grepctx/querygen.hpp"
#include "grepctx/rank.hpp"
#include "grepctx/search.hpp"

namespace grepctx {

enum class PipelineMode { naive, full };

struct PipelineConfig {
  PipelineMode mode = PipelineMode::full;
  int m = 10;             // query budget
  int top_k = 10;         // K
  int budget = 4096;      // context token budget
  double top_percent = 50.0;  // N, fusion pool fraction
  int adjacency_gap = 1;      // G
  int before = 3;             // chunk window above the hit
  int after = 10;             // chunk window below the hit
  int window_lines = 20;      // L, trailing context window
  int hit_cap = 200;          // per-query hit cap
  std::string generator = "heuristic";  // "heuristic" or an external endpoint
  bool multiset_jaccard = false;
  PromptOrder prompt_order = PromptOrder::relevance_first;
};

inline PipelineMode pipeline_mode_from_name(const std::string& name) {
  if (name == "naive") return PipelineMode::naive;
  if (name == "full") return PipelineMode::full;
  throw std::invalid_argument("unknown pipeline mode: " + name);
}

struct RetrievalResult {
  ContextPack pack;
  LatencyRecord latency;
  QuerySet queries;
  std::vector<Chunk> pool;          // candidate pool before ranking
  std::vector<FusedBlock> top_k;    // blocks admitted to the pack
  bool retrieval_empty = false;     // zero queries or zero hits
  std::vector<std::string> warnings;
};

using QueryGenerator = std::function<QuerySet(const CompletionTask&, int)>;

/// One retrieval run over an already-scanned snapshot. mode=naive: queries ->
/// execute -> Jaccard rank -> Top-K -> assemble. mode=full: queries ->
/// execute -> BM25 rank -> top-N% fusion -> assemble.
inline RetrievalResult run_retrieval(const RepoSnapshot& snapshot, const CompletionTask& task,
                                     const PipelineConfig& cfg,
                                     const QueryGenerator& external_generator = {}) {
  RetrievalResult res;
  res.latency.task_id = task.task_id;
  PhaseTimer timer(res.latency);

  res.queries = timer.run("querygen", [&] {
    if (cfg.generator != "heuristic" && external_generator)
      return external_generator(task, cfg.m);
    return generate_queries(task, cfg.m, cfg.window_lines);
  });
  res.latency.generation_seconds = res.latency.phase_breakdown["querygen"];

  res.pool = timer.run("search", [&] {
    return execute_query_set(snapshot, res.queries, cfg.before, cfg.after,
                             static_cast<std::size_t>(cfg.hit_cap));
  });
  if (res.pool.empty()) {
    res.retrieval_empty = true;
    res.pack = assemble_context({}, cfg.top_k, cfg.budget, cfg.prompt_order, task.task_id);
    return res;
  }

  // Both rankers see the same trailing window of the local context that the
  // heuristic generator reads.
  TokenBag context_tokens = tokenize([&] {
    auto lines = detail::split_lines(task.local_context);
    std::size_t first = lines.size() > static_cast<std::size_t>(cfg.window_lines)
                            ? lines.size() - static_cast<std::size_t>(cfg.window_lines)
                            : 0;
    std::string window;
    for (std::size_t i = first; i < lines.size(); ++i) {
      window += lines[i];
      window += '\n';
    }
    return window;
  }());

  std::vector<FusedBlock> blocks;
  if (cfg.mode == PipelineMode::naive) {
    auto ranked = timer.run("rank", [&] {
      return jaccard_rank(res.pool, context_tokens, cfg.multiset_jaccard);
    });
    // Top-K without fusion: carry the chunks over as single-source blocks.
    blocks = timer.run("select", [&] {
      std::vector<FusedBlock> out;
      for (const auto& rc : ranked) {
        if (static_cast<int>(out.size()) >= cfg.top_k) break;
        FusedBlock b;
        b.file = rc.chunk.file;
        b.interval = rc.chunk.interval;
        b.text = rc.chunk.text;
        b.merged_from = {rc.chunk.chunk_id};
        b.best_rank = rc.rank;
        b.score = rc.score;
        out.push_back(std::move(b));
      }
      return out;
    });
  } else {
    auto ranked = timer.run("rank", [&] { return bm25_rank(res.pool, context_tokens); });
    blocks = timer.run("fuse", [&] {
      return dedup_pipeline(ranked, snapshot, {cfg.top_percent, cfg.adjacency_gap});
    });
  }

  res.pack = timer.run("assemble", [&] {
    return assemble_context(blocks, cfg.top_k, cfg.budget, cfg.prompt_order, task.task_id);
  });
  res.top_k = res.pack.blocks;
  res.retrieval_empty = res.pack.blocks.empty() && res.pool.empty();
  return res;
}

}  // namespace grepctx
