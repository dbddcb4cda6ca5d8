#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "grepctx/search.hpp"

namespace grepctx {

/// Multiset of code tokens: maximal runs of [A-Za-z0-9_], case preserved.
struct TokenBag {
  std::vector<std::string> tokens;                // in text order, with repeats
  std::unordered_map<std::string, int> counts;
  std::set<std::string> distinct;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

inline TokenBag tokenize(const std::string& text) {
  TokenBag bag;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!detail::is_ident_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && detail::is_ident_char(text[j])) ++j;
    std::string tok = text.substr(i, j - i);
    bag.counts[tok]++;
    bag.distinct.insert(tok);
    bag.tokens.push_back(std::move(tok));
    i = j;
  }
  return bag;
}

inline double jaccard_score(const TokenBag& a, const TokenBag& b) {
  if (a.distinct.empty() && b.distinct.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : a.distinct) inter += b.distinct.count(t);
  std::size_t uni = a.distinct.size() + b.distinct.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Multiset variant (ablation): intersection/union over token multiplicities.
inline double jaccard_score_multiset(const TokenBag& a, const TokenBag& b) {
  if (a.tokens.empty() && b.tokens.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& [tok, ca] : a.counts) {
    auto it = b.counts.find(tok);
    if (it != b.counts.end()) inter += static_cast<std::size_t>(std::min(ca, it->second));
  }
  std::size_t uni = a.tokens.size() + b.tokens.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

enum class RankMethod { jaccard, bm25 };

struct RankedChunk {
  Chunk chunk;
  double score = 0.0;
  RankMethod method = RankMethod::jaccard;
  int rank = 0;  // 1-based after sorting
};

namespace detail {

inline void sort_and_number(std::vector<RankedChunk>& ranked) {
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedChunk& a, const RankedChunk& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.chunk.file != b.chunk.file) return a.chunk.file < b.chunk.file;
    return a.chunk.interval.start < b.chunk.interval.start;
  });
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = static_cast<int>(i + 1);
}

}  // namespace detail

inline constexpr double kBm25K1 = 1.2;
inline constexpr double kBm25B = 0.75;

/// Okapi BM25 over the candidate pool itself: each chunk is a document, the
/// completion context is the query, and IDF is computed pool-wide with the
/// plus-one smoothing so scores stay non-negative.
inline std::vector<RankedChunk> bm25_rank(const std::vector<Chunk>& pool,
                                          const TokenBag& query_tokens, double k1 = kBm25K1,
                                          double b = kBm25B) {
  std::vector<RankedChunk> ranked;
  if (pool.empty()) return ranked;

  std::vector<TokenBag> docs;
  docs.reserve(pool.size());
  double total_len = 0;
  std::unordered_map<std::string, int> doc_freq;
  for (const auto& c : pool) {
    docs.push_back(tokenize(c.text));
    total_len += static_cast<double>(docs.back().size());
    for (const auto& t : docs.back().distinct) doc_freq[t]++;
  }
  double avg_len = total_len / static_cast<double>(pool.size());
  double n_docs = static_cast<double>(pool.size());

  std::unordered_map<std::string, double> idf;
  for (const auto& [term, df] : doc_freq)
    idf[term] = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));

  ranked.reserve(pool.size());
  for (std::size_t d = 0; d < pool.size(); ++d) {
    double dl = static_cast<double>(docs[d].size());
    double norm = k1 * (1.0 - b + b * (avg_len > 0 ? dl / avg_len : 0.0));
    double score = 0.0;
    for (const auto& [term, qtf] : query_tokens.counts) {
      auto it = docs[d].counts.find(term);
      if (it == docs[d].counts.end()) continue;
      double tf = static_cast<double>(it->second);
      score += qtf * idf[term] * tf * (k1 + 1.0) / (tf + norm);
    }
    ranked.push_back({pool[d], score, RankMethod::bm25, 0});
  }
  detail::sort_and_number(ranked);
  return ranked;
}

inline std::vector<RankedChunk> jaccard_rank(const std::vector<Chunk>& pool,
                                             const TokenBag& context_tokens,
                                             bool multiset = false) {
  std::vector<RankedChunk> ranked;
  ranked.reserve(pool.size());
  for (const auto& c : pool) {
    TokenBag doc = tokenize(c.text);
    double s = multiset ? jaccard_score_multiset(doc, context_tokens)
                        : jaccard_score(doc, context_tokens);
    ranked.push_back({c, s, RankMethod::jaccard, 0});
  }
  detail::sort_and_number(ranked);
  return ranked;
}

}  // namespace grepctx
