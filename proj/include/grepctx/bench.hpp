#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "grepctx/pipeline.hpp"

namespace grepctx {

/// Deterministic synthetic python-ish repository of roughly `total_lines`
/// lines, used by the latency benchmark. A handful of known definitions
/// (DataConfigModel, load_config, DeckShuffler, draw_card) are planted at
/// fixed points so the benchmark tasks always have retrieval targets.
inline RepoSnapshot generate_synthetic_repo(std::uint64_t total_lines, std::uint32_t seed = 42) {
  static const std::vector<std::string> words = {
      "alpha", "beta",   "gamma",  "delta",  "widget", "handler", "buffer", "stream",
      "cache", "record", "parser", "token",  "queue",  "worker",  "engine", "payload",
      "route", "metric", "limit",  "policy", "batch",  "filter",  "cursor", "margin"};
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> num(0, 999);

  std::vector<SourceFile> files;
  std::uint64_t emitted = 0;
  int file_index = 0;
  const std::uint64_t lines_per_file = 120;
  while (emitted < total_lines) {
    SourceFile f;
    char name[64];
    std::snprintf(name, sizeof name, "pkg_%02d/module_%04d.py", file_index % 20, file_index);
    f.path = name;
    f.language = Language::python;
    std::uint64_t want = std::min(lines_per_file, total_lines - emitted);
    if (file_index == 0) {
      f.lines = {"class DataConfigModel:",
                 "    def __init__(self, path):",
                 "        self.path = path",
                 "",
                 "    def load_config(self, strict=True):",
                 "        with open(self.path) as fh:",
                 "            return fh.read()",
                 "",
                 "class DeckShuffler:",
                 "    def draw_card(self):",
                 "        return self.cards.pop()"};
    }
    while (f.lines.size() < want) {
      const std::string& a = words[pick(rng)];
      const std::string& b = words[pick(rng)];
      const std::string& c = words[pick(rng)];
      switch (f.lines.size() % 8) {
        case 0:
          f.lines.push_back("def " + a + "_" + b + "_" + std::to_string(num(rng)) + "(arg):");
          break;
        case 7:
          f.lines.push_back("");
          break;
        default:
          f.lines.push_back("    " + a + "_value = " + b + "_helper(" + c + "_input, " +
                            std::to_string(num(rng)) + ")");
      }
    }
    emitted += f.lines.size();
    files.push_back(std::move(f));
    ++file_index;
  }
  return make_snapshot("synthetic", std::move(files));
}

inline void write_snapshot_to_dir(const RepoSnapshot& snap, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  for (const auto& f : snap.files) {
    fs::path p = dir / f.path;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    for (const auto& line : f.lines) out << line << '\n';
  }
}

/// Fixed tasks targeting the planted identifiers; identical across repo sizes
/// so generation time depends only on the local context.
inline std::vector<CompletionTask> bench_tasks() {
  std::vector<CompletionTask> tasks;
  CompletionTask t1;
  t1.task_id = "bench-config";
  t1.file = "app.py";
  t1.language = Language::python;
  t1.local_context =
      "from pkg_00.module_0000 import DataConfigModel\n"
      "model = DataConfigModel(config_path)\n"
      "settings = model.load_config(";
  tasks.push_back(t1);

  CompletionTask t2;
  t2.task_id = "bench-deck";
  t2.file = "game.py";
  t2.language = Language::python;
  t2.local_context =
      "class Dealer:\n"
      "    def __init__(self):\n"
      "        self.deck = DeckShuffler()\n"
      "    def deal(self):\n"
      "        card = self.deck.draw_card(";
  tasks.push_back(t2);

  CompletionTask t3;
  t3.task_id = "bench-worker";
  t3.file = "jobs.py";
  t3.language = Language::python;
  t3.local_context =
      "queue_value = batch_helper(worker_input, 3)\n"
      "cache_value = stream_helper(parser_input, 7)\n"
      "result = engine_helper(";
  tasks.push_back(t3);
  return tasks;
}

struct BenchRow {
  std::uint64_t repo_lines = 0;
  double scan_seconds = 0.0;             // snapshot construction, once per size
  double mean_retrieval_seconds = 0.0;   // per task, full pipeline
  double mean_generation_seconds = 0.0;  // query generation alone
};

inline std::vector<BenchRow> run_bench(const std::vector<std::uint64_t>& sizes,
                                       const PipelineConfig& cfg, int repetitions = 3,
                                       std::uint32_t seed = 42) {
  std::vector<BenchRow> rows;
  auto tasks = bench_tasks();
  for (auto size : sizes) {
    BenchRow row;
    row.repo_lines = size;
    auto [snap, scan_s] = time_phase([&] { return generate_synthetic_repo(size, seed); });
    row.scan_seconds = scan_s;
    int runs = 0;
    for (int rep = 0; rep < repetitions; ++rep) {
      for (const auto& task : tasks) {
        auto res = run_retrieval(snap, task, cfg);
        row.mean_retrieval_seconds += res.latency.retrieval_seconds;
        row.mean_generation_seconds += res.latency.generation_seconds.value_or(0.0);
        ++runs;
      }
    }
    if (runs > 0) {
      row.mean_retrieval_seconds /= runs;
      row.mean_generation_seconds /= runs;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace grepctx
