#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "grepctx/rank.hpp"

namespace grepctx {

struct FusionConfig {
  double top_percent = 50.0;  // N, in (0,100]
  int adjacency_gap = 1;      // G: merge intervals within G lines of each other
};

struct FusedBlock {
  std::string file;
  LineInterval interval;
  std::string text;
  std::vector<std::string> merged_from;  // constituent chunk_ids, by source rank
  int best_rank = 0;                     // min over constituents
  double score = 0.0;                    // max over constituents
};

inline std::vector<RankedChunk> select_top_percent(const std::vector<RankedChunk>& ranked,
                                                   double top_percent) {
  if (ranked.empty()) return {};
  auto keep = static_cast<std::size_t>(
      std::ceil(static_cast<double>(ranked.size()) * top_percent / 100.0));
  keep = std::min(keep, ranked.size());
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep)};
}

/// Transitively merges overlapping-or-near intervals per file into hull
/// blocks. Block text is re-sliced from the snapshot, never concatenated from
/// chunk texts, so an overlap region appears exactly once. Output ordered by
/// best_rank ascending.
inline std::vector<FusedBlock> merge_intervals(const std::vector<RankedChunk>& chunks,
                                               const RepoSnapshot& snapshot, int gap = 1) {
  std::map<std::string, std::vector<const RankedChunk*>> by_file;
  for (const auto& rc : chunks) by_file[rc.chunk.file].push_back(&rc);

  std::vector<FusedBlock> blocks;
  for (auto& [file, list] : by_file) {
    std::sort(list.begin(), list.end(), [](const RankedChunk* a, const RankedChunk* b) {
      if (a->chunk.interval.start != b->chunk.interval.start)
        return a->chunk.interval.start < b->chunk.interval.start;
      return a->chunk.interval.end < b->chunk.interval.end;
    });
    std::size_t i = 0;
    while (i < list.size()) {
      FusedBlock blk;
      blk.file = file;
      blk.interval = list[i]->chunk.interval;
      std::vector<const RankedChunk*> members = {list[i]};
      std::size_t j = i + 1;
      while (j < list.size() && list[j]->chunk.interval.start <= blk.interval.end + gap + 1) {
        blk.interval.end = std::max(blk.interval.end, list[j]->chunk.interval.end);
        members.push_back(list[j]);
        ++j;
      }
      std::sort(members.begin(), members.end(),
                [](const RankedChunk* a, const RankedChunk* b) { return a->rank < b->rank; });
      blk.best_rank = members.front()->rank;
      for (const auto* m : members) {
        blk.merged_from.push_back(m->chunk.chunk_id);
        blk.score = std::max(blk.score, m->score);
      }
      blk.text = slice(snapshot, file, blk.interval);
      blocks.push_back(std::move(blk));
      i = j;
    }
  }
  std::sort(blocks.begin(), blocks.end(), [](const FusedBlock& a, const FusedBlock& b) {
    if (a.best_rank != b.best_rank) return a.best_rank < b.best_rank;
    if (a.file != b.file) return a.file < b.file;
    return a.interval.start < b.interval.start;
  });
  return blocks;
}

inline std::vector<FusedBlock> dedup_pipeline(const std::vector<RankedChunk>& ranked,
                                              const RepoSnapshot& snapshot,
                                              const FusionConfig& cfg = {}) {
  return merge_intervals(select_top_percent(ranked, cfg.top_percent), snapshot,
                         cfg.adjacency_gap);
}

}  // namespace grepctx
