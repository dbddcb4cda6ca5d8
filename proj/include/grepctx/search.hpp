#pragma once

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "grepctx/corpus.hpp"
#include "grepctx/querygen.hpp"

namespace grepctx {

struct MatchHit {
  std::string query_id;
  std::string file;
  int line = 0;  // 1-based
  std::string text;
};

struct Chunk {
  std::string chunk_id;  // "<file>:<start>-<end>"
  std::string file;
  LineInterval interval;
  std::string text;
  std::set<std::string> provenance;  // query_ids
  int hit_line = 0;
};

inline std::string make_chunk_id(const std::string& file, LineInterval iv) {
  return file + ":" + std::to_string(iv.start) + "-" + std::to_string(iv.end);
}

namespace detail {

// Longest unescaped run of word characters in a regex pattern, usable as a
// cheap substring prefilter before the full regex runs. Runs inside character
// classes or right before a quantifier are unsafe and excluded.
inline std::string prefilter_literal(const std::string& pattern) {
  std::string best, cur;
  bool in_class = false;
  int depth = 0;
  auto flush = [&](bool quantified) {
    if (quantified && !cur.empty()) cur.pop_back();  // last char may repeat/vanish
    if (depth == 0 && cur.size() > best.size()) best = cur;
    cur.clear();
  };
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char c = pattern[i];
    if (c == '\\') {
      flush(false);
      ++i;
      continue;
    }
    if (in_class) {
      if (c == ']') in_class = false;
      continue;
    }
    if (c == '[') {
      flush(false);
      in_class = true;
      continue;
    }
    if (c == '|') {
      // Alternation makes every literal optional; give up on prefiltering.
      if (depth == 0) return {};
      flush(false);
      continue;
    }
    if (c == '(') {
      flush(false);
      ++depth;
      continue;
    }
    if (c == ')') {
      flush(false);
      if (depth > 0) --depth;
      continue;
    }
    if (is_ident_char(c)) {
      cur += c;
      continue;
    }
    flush(c == '*' || c == '+' || c == '?' || c == '{');
  }
  flush(false);
  return best;
}

inline bool contains_nocase(const std::string& haystack, const std::string& needle) {
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                        [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) ==
                                 std::tolower(static_cast<unsigned char>(b));
                        });
  return it != haystack.end();
}

}  // namespace detail

/// Line-oriented match of one query over the whole snapshot, ordered by
/// (path, line) and truncated at hit_cap. Literal patterns take a substring
/// fast path; regex patterns are prefiltered by their longest literal run.
inline std::vector<MatchHit> execute_query(const RepoSnapshot& snap, const LexicalQuery& query,
                                           std::size_t hit_cap = 200) {
  std::vector<MatchHit> hits;
  auto literal = detail::literal_of(query.pattern);
  std::optional<std::regex> re;
  std::string prefilter;
  if (!literal) {
    auto flags = std::regex::ECMAScript | std::regex::optimize;
    if (!query.case_sensitive) flags |= std::regex::icase;
    re.emplace(query.pattern, flags);
    if (query.case_sensitive) prefilter = detail::prefilter_literal(query.pattern);
  }

  for (const auto& f : snap.files) {
    for (std::size_t i = 0; i < f.lines.size(); ++i) {
      const std::string& line = f.lines[i];
      bool matched;
      if (literal) {
        matched = query.case_sensitive ? line.find(*literal) != std::string::npos
                                       : detail::contains_nocase(line, *literal);
      } else {
        if (!prefilter.empty() && line.find(prefilter) == std::string::npos) continue;
        matched = std::regex_search(line, *re);
      }
      if (!matched) continue;
      hits.push_back({query.query_id, f.path, static_cast<int>(i + 1), line});
      if (hits.size() >= hit_cap) return hits;
    }
  }
  return hits;
}

inline Chunk expand_hit(const RepoSnapshot& snap, const MatchHit& hit, int before = 3,
                        int after = 10) {
  const SourceFile* f = snap.find(hit.file);
  int n = f ? static_cast<int>(f->lines.size()) : hit.line;
  Chunk c;
  c.file = hit.file;
  c.interval = {std::max(1, hit.line - before), std::min(n, hit.line + after)};
  c.chunk_id = make_chunk_id(c.file, c.interval);
  c.text = slice(snap, c.file, c.interval);
  c.provenance = {hit.query_id};
  c.hit_line = hit.line;
  return c;
}

/// Pool construction: all queries executed and expanded, chunks with equal
/// (file, interval) coalesced with unioned provenance, output ordered by
/// (file, start, end).
inline std::vector<Chunk> execute_query_set(const RepoSnapshot& snap, const QuerySet& queries,
                                            int before = 3, int after = 10,
                                            std::size_t hit_cap = 200) {
  std::map<std::pair<std::string, std::pair<int, int>>, Chunk> coalesced;
  for (const auto& q : queries.queries) {
    for (const auto& hit : execute_query(snap, q, hit_cap)) {
      Chunk c = expand_hit(snap, hit, before, after);
      auto key = std::make_pair(c.file, std::make_pair(c.interval.start, c.interval.end));
      auto [it, inserted] = coalesced.emplace(std::move(key), std::move(c));
      if (!inserted) it->second.provenance.insert(q.query_id);
    }
  }
  std::vector<Chunk> pool;
  pool.reserve(coalesced.size());
  for (auto& [key, chunk] : coalesced) pool.push_back(std::move(chunk));
  return pool;
}

}  // namespace grepctx
