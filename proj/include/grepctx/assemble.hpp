#pragma once

#include <string>
#include <vector>

#include "grepctx/fuse.hpp"

namespace grepctx {

struct ContextPack {
  std::string task_id;
  std::vector<FusedBlock> blocks;  // admitted blocks, prompt order
  int token_count = 0;
  int budget = 0;
  std::string rendered;
};

/// Lexical-token count; stands in for the downstream model's tokenizer.
inline int count_tokens(const std::string& text) {
  return static_cast<int>(tokenize(text).size());
}

enum class PromptOrder { relevance_first, relevance_last };

inline std::string block_header(const FusedBlock& blk) {
  const char* prefix = language_from_extension(blk.file) == Language::python ? "#" : "//";
  return std::string(prefix) + " file: " + blk.file + " lines " +
         std::to_string(blk.interval.start) + "-" + std::to_string(blk.interval.end);
}

/// Greedy Top-K selection under a hard token budget. A block that would push
/// the rendered pack over budget is skipped whole; blocks are never truncated.
/// The budget check re-counts the full rendered text after each candidate.
inline ContextPack assemble_context(const std::vector<FusedBlock>& blocks, int k, int budget,
                                    PromptOrder order = PromptOrder::relevance_first,
                                    const std::string& task_id = {}) {
  ContextPack pack;
  pack.task_id = task_id;
  pack.budget = budget;
  std::string rendered;
  for (const auto& blk : blocks) {
    if (static_cast<int>(pack.blocks.size()) >= k) break;
    std::string candidate = rendered;
    if (!candidate.empty()) candidate += "\n\n";
    candidate += block_header(blk) + "\n" + blk.text;
    if (count_tokens(candidate) > budget) continue;
    rendered = std::move(candidate);
    pack.blocks.push_back(blk);
  }
  if (order == PromptOrder::relevance_last && pack.blocks.size() > 1) {
    std::reverse(pack.blocks.begin(), pack.blocks.end());
    rendered.clear();
    for (const auto& blk : pack.blocks) {
      if (!rendered.empty()) rendered += "\n\n";
      rendered += block_header(blk) + "\n" + blk.text;
    }
  }
  pack.rendered = std::move(rendered);
  pack.token_count = count_tokens(pack.rendered);
  return pack;
}

}  // namespace grepctx
