#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "grepctx/assemble.hpp"

namespace grepctx {

struct EvalMetrics {
  double code_em = 0, code_es = 0, code_recall = 0, code_f1 = 0;
  double id_em = 0, id_es = 0, id_recall = 0, id_f1 = 0;
};

enum class FailureClass { recall_failure, rerank_failure };

inline const char* failure_class_name(FailureClass f) {
  return f == FailureClass::recall_failure ? "recall_failure" : "rerank_failure";
}

struct CoverageReport {
  double ratio = 0.0;
  double tau = 0.8;
  bool covered = false;
  std::optional<FailureClass> failure_class;
};

struct LatencyRecord {
  std::string task_id;
  double retrieval_seconds = 0.0;
  double cpu_seconds = 0.0;
  std::optional<double> generation_seconds;
  std::map<std::string, double> phase_breakdown;
};

namespace detail {

inline std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(std::move(tok));
  return out;
}

}  // namespace detail

/// 100 iff the whitespace-normalized token sequences are identical. With
/// raw=true compares the raw strings instead.
inline double exact_match(const std::string& prediction, const std::string& reference,
                          bool raw = false) {
  if (raw) return prediction == reference ? 100.0 : 0.0;
  return detail::whitespace_tokens(prediction) == detail::whitespace_tokens(reference) ? 100.0
                                                                                       : 0.0;
}

inline std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// 100 * (1 - Lev(p,r) / max(|p|,|r|)) over characters; both empty -> 100.
inline double edit_similarity(const std::string& prediction, const std::string& reference) {
  std::size_t longest = std::max(prediction.size(), reference.size());
  if (longest == 0) return 100.0;
  return 100.0 * (1.0 - static_cast<double>(levenshtein(prediction, reference)) /
                            static_cast<double>(longest));
}

/// Multiset-overlap recall and F1 over code tokens. Empty reference -> recall
/// 100; precision over the prediction as usual.
inline std::pair<double, double> token_recall_f1(const std::string& prediction,
                                                 const std::string& reference) {
  TokenBag p = tokenize(prediction), r = tokenize(reference);
  std::size_t overlap = 0;
  for (const auto& [tok, cr] : r.counts) {
    auto it = p.counts.find(tok);
    if (it != p.counts.end()) overlap += static_cast<std::size_t>(std::min(cr, it->second));
  }
  double recall = r.empty() ? 100.0 : 100.0 * overlap / static_cast<double>(r.size());
  double precision = p.empty() ? (r.empty() ? 100.0 : 0.0)
                               : 100.0 * overlap / static_cast<double>(p.size());
  double f1 = (precision + recall > 0) ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return {recall, f1};
}

/// Identifier set of a text: tokens minus language keywords and pure numbers.
inline std::set<std::string> extract_identifier_set(const std::string& text, Language language) {
  std::set<std::string> ids;
  const auto& keywords = detail::language_keywords(language);
  for (const auto& tok : tokenize(text).distinct)
    if (!keywords.count(tok) && !detail::is_pure_number(tok)) ids.insert(tok);
  return ids;
}

struct IdentifierMetrics {
  double em = 0, es = 0, recall = 0, f1 = 0;
};

inline IdentifierMetrics identifier_metrics(const std::string& prediction,
                                            const std::string& reference, Language language) {
  auto p = extract_identifier_set(prediction, language);
  auto r = extract_identifier_set(reference, language);
  std::size_t overlap = 0;
  for (const auto& id : r) overlap += p.count(id);

  IdentifierMetrics m;
  m.em = (p == r) ? 100.0 : 0.0;
  m.recall = r.empty() ? 100.0 : 100.0 * overlap / static_cast<double>(r.size());
  double precision = p.empty() ? (r.empty() ? 100.0 : 0.0)
                               : 100.0 * overlap / static_cast<double>(p.size());
  m.f1 = (precision + m.recall > 0) ? 2.0 * precision * m.recall / (precision + m.recall) : 0.0;

  auto joined = [](const std::set<std::string>& ids) {
    std::string s;
    for (const auto& id : ids) {
      if (!s.empty()) s += ' ';
      s += id;
    }
    return s;
  };
  m.es = edit_similarity(joined(p), joined(r));
  return m;
}

namespace detail {

inline void collect_lines(std::set<std::pair<std::string, int>>& out, const std::string& file,
                          LineInterval iv) {
  for (int l = iv.start; l <= iv.end; ++l) out.emplace(file, l);
}

}  // namespace detail

inline std::set<std::pair<std::string, int>> lines_of(const std::vector<FusedBlock>& blocks) {
  std::set<std::pair<std::string, int>> s;
  for (const auto& b : blocks) detail::collect_lines(s, b.file, b.interval);
  return s;
}

inline std::set<std::pair<std::string, int>> lines_of(const std::vector<Chunk>& chunks) {
  std::set<std::pair<std::string, int>> s;
  for (const auto& c : chunks) detail::collect_lines(s, c.file, c.interval);
  return s;
}

/// Line-level intersection ratio |retrieved ∩ gold| / |gold|. Throws on empty
/// gold (undefined denominator); callers report that sample as errored.
inline double coverage_ratio(const std::set<std::pair<std::string, int>>& retrieved,
                             const std::set<std::pair<std::string, int>>& gold) {
  if (gold.empty()) throw std::invalid_argument("coverage_ratio: empty golden context");
  std::size_t inter = 0;
  for (const auto& l : gold) inter += retrieved.count(l);
  return static_cast<double>(inter) / static_cast<double>(gold.size());
}

inline CoverageReport make_coverage_report(double ratio, double tau) {
  CoverageReport r;
  r.ratio = ratio;
  r.tau = tau;
  r.covered = ratio >= tau;
  return r;
}

inline std::optional<FailureClass> classify_failure(double pool_coverage, double topk_coverage,
                                                    double tau) {
  if (pool_coverage < tau) return FailureClass::recall_failure;
  if (topk_coverage < tau) return FailureClass::rerank_failure;
  return std::nullopt;
}

/// Wall-clock timing of a deferred computation.
template <typename F>
auto time_phase(F&& work) {
  auto t0 = std::chrono::steady_clock::now();
  if constexpr (std::is_void_v<decltype(work())>) {
    work();
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    return dt.count();
  } else {
    auto result = work();
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    return std::make_pair(std::move(result), dt.count());
  }
}

/// Accumulates named phase durations into a LatencyRecord breakdown.
class PhaseTimer {
 public:
  explicit PhaseTimer(LatencyRecord& record) : record_(record) {}

  template <typename F>
  auto run(const std::string& phase, F&& work) {
    auto t0 = std::chrono::steady_clock::now();
    auto c0 = std::clock();
    if constexpr (std::is_void_v<decltype(work())>) {
      work();
      finish(phase, t0, c0);
    } else {
      auto result = work();
      finish(phase, t0, c0);
      return result;
    }
  }

 private:
  void finish(const std::string& phase, std::chrono::steady_clock::time_point t0,
              std::clock_t c0) {
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    record_.phase_breakdown[phase] += dt.count();
    record_.retrieval_seconds += dt.count();
    record_.cpu_seconds += static_cast<double>(std::clock() - c0) / CLOCKS_PER_SEC;
  }

  LatencyRecord& record_;
};

}  // namespace grepctx
