#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "grepctx/metrics.hpp"

using namespace grepctx;

namespace {

// Recursive-definition Levenshtein with memoization, independent of the DP
// row implementation in the library.
std::size_t lev_oracle_impl(const std::string& a, const std::string& b, std::size_t i,
                            std::size_t j, std::vector<std::vector<int>>& memo) {
  if (i == 0) return j;
  if (j == 0) return i;
  if (memo[i][j] >= 0) return static_cast<std::size_t>(memo[i][j]);
  std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
  std::size_t r = std::min({lev_oracle_impl(a, b, i - 1, j, memo) + 1,
                            lev_oracle_impl(a, b, i, j - 1, memo) + 1,
                            lev_oracle_impl(a, b, i - 1, j - 1, memo) + cost});
  memo[i][j] = static_cast<int>(r);
  return r;
}

std::size_t lev_oracle(const std::string& a, const std::string& b) {
  std::vector<std::vector<int>> memo(a.size() + 1, std::vector<int>(b.size() + 1, -1));
  return lev_oracle_impl(a, b, a.size(), b.size(), memo);
}

FusedBlock span(const std::string& file, int start, int end) {
  FusedBlock b;
  b.file = file;
  b.interval = {start, end};
  b.merged_from = {make_chunk_id(file, b.interval)};
  b.best_rank = 1;
  return b;
}

}  // namespace

TEST_CASE("exact_match over whitespace-normalized tokens") {
  CHECK(exact_match("return x + 1", "return x + 1") == 100.0);
  CHECK(exact_match("return x + 1", "return x + 2") == 0.0);
  CHECK(exact_match("return  x +\t1", "return x + 1") == 100.0);
  CHECK(exact_match("return  x + 1", "return x + 1", /*raw=*/true) == 0.0);
}

TEST_CASE("edit_similarity worked cases") {
  CHECK(edit_similarity("draw()", "draw()") == 100.0);
  CHECK(edit_similarity("abc", "abd") == Catch::Approx(100.0 * 2.0 / 3.0).margin(0.01));
  CHECK(edit_similarity("", "abc") == 0.0);
  CHECK(edit_similarity("", "") == 100.0);
}

TEST_CASE("edit_similarity symmetry, bounds, identity vs oracle") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> len(0, 15), ch(0, 3);
  for (int t = 0; t < 200; ++t) {
    std::string a, b;
    for (int i = len(rng); i > 0; --i) a += static_cast<char>('a' + ch(rng));
    for (int i = len(rng); i > 0; --i) b += static_cast<char>('a' + ch(rng));
    double es = edit_similarity(a, b);
    CHECK(es == edit_similarity(b, a));
    CHECK(es >= 0.0);
    CHECK(es <= 100.0);
    CHECK((es == 100.0) == (a == b));
    CHECK(levenshtein(a, b) == lev_oracle(a, b));
  }
}

TEST_CASE("token recall and f1 over multisets") {
  auto [r1, f1] = token_recall_f1("a b c", "a b c");
  CHECK(r1 == 100.0);
  CHECK(f1 == 100.0);
  auto [r2, f2] = token_recall_f1("x y", "p q");
  CHECK(r2 == 0.0);
  CHECK(f2 == 0.0);
  // P={a,b}, R={a,c}: overlap 1, recall 50, precision 50, f1 50
  auto [r3, f3] = token_recall_f1("a b", "a c");
  CHECK(r3 == 50.0);
  CHECK(f3 == 50.0);
  auto [r4, f4] = token_recall_f1("anything", "");
  CHECK(r4 == 100.0);
  CHECK(f4 == 0.0);
}

TEST_CASE("identifier metrics treat identifiers as an unordered set") {
  auto same_order = identifier_metrics("foo(bar, baz)", "baz(bar, foo)", Language::python);
  CHECK(same_order.em == 100.0);
  CHECK(same_order.es == 100.0);
  CHECK(same_order.recall == 100.0);

  auto extra = identifier_metrics("foo(bar, extra)", "foo(bar)", Language::python);
  CHECK(extra.em == 0.0);
  CHECK(extra.recall == 100.0);
  CHECK(extra.f1 < 100.0);

  auto empty = identifier_metrics("return 1 + 2", "if 3", Language::python);
  CHECK(empty.em == 100.0);
  CHECK(empty.recall == 100.0);
}

TEST_CASE("keywords and numbers are not identifiers") {
  auto ids = extract_identifier_set("def run(self): return value + 42", Language::python);
  CHECK(ids == std::set<std::string>{"run", "value"});
}

TEST_CASE("EvalMetrics consistency: code_em 100 implies the rest") {
  std::string p = "card = deck.draw()";
  EvalMetrics m;
  m.code_em = exact_match(p, p);
  m.code_es = edit_similarity(p, p);
  std::tie(m.code_recall, m.code_f1) = token_recall_f1(p, p);
  REQUIRE(m.code_em == 100.0);
  CHECK(m.code_es == 100.0);
  CHECK(m.code_recall == 100.0);
  CHECK(m.code_f1 == 100.0);
}

TEST_CASE("coverage_ratio worked cases") {
  std::vector<FusedBlock> gold_blocks = {span("a.py", 1, 10)};
  auto gold = lines_of(gold_blocks);

  CHECK(coverage_ratio(lines_of(std::vector<FusedBlock>{span("a.py", 1, 10)}), gold) == 1.0);
  CHECK(coverage_ratio(lines_of(std::vector<FusedBlock>{span("a.py", 1, 9)}), gold) == 0.9);
  CHECK(coverage_ratio(lines_of(std::vector<FusedBlock>{span("b.py", 1, 10)}), gold) == 0.0);
  CHECK_THROWS_AS(coverage_ratio({}, {}), std::invalid_argument);

  auto report = make_coverage_report(0.9, 0.8);
  CHECK(report.covered);
  CHECK(!make_coverage_report(0.79, 0.8).covered);
}

TEST_CASE("coverage_ratio is monotone in retrieved lines") {
  std::mt19937 rng(29);
  std::uniform_int_distribution<int> line(1, 40);
  auto gold = lines_of(std::vector<FusedBlock>{span("a.py", 5, 25)});
  std::set<std::pair<std::string, int>> retrieved;
  double prev = 0.0;
  for (int i = 0; i < 60; ++i) {
    retrieved.emplace("a.py", line(rng));
    double r = coverage_ratio(retrieved, gold);
    CHECK(r >= prev);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    prev = r;
  }
}

TEST_CASE("classify_failure is total and exclusive") {
  CHECK(classify_failure(0.3, 0.1, 0.8) == FailureClass::recall_failure);
  CHECK(classify_failure(0.95, 0.4, 0.8) == FailureClass::rerank_failure);
  CHECK(classify_failure(0.9, 0.9, 0.8) == std::nullopt);
  // Gate order: pool below tau wins even when topk is also below.
  CHECK(classify_failure(0.5, 0.5, 0.8) == FailureClass::recall_failure);
  for (double pool : {0.0, 0.5, 0.8, 1.0})
    for (double topk : {0.0, 0.5, 0.8, 1.0}) {
      auto f = classify_failure(pool, topk, 0.8);
      int outcomes = (f == FailureClass::recall_failure) + (f == FailureClass::rerank_failure) +
                     (f == std::nullopt);
      CHECK(outcomes == 1);
    }
}

TEST_CASE("time_phase measures a no-op as roughly zero") {
  auto [value, seconds] = time_phase([] { return 42; });
  CHECK(value == 42);
  CHECK(seconds >= 0.0);
  CHECK(seconds < 0.5);
}

TEST_CASE("phase breakdown sums into total retrieval time") {
  LatencyRecord rec;
  PhaseTimer timer(rec);
  timer.run("a", [] {});
  int got = timer.run("b", [] { return 7; });
  CHECK(got == 7);
  double sum = 0;
  for (const auto& [name, s] : rec.phase_breakdown) sum += s;
  CHECK(rec.retrieval_seconds == Catch::Approx(sum));
  CHECK(rec.phase_breakdown.size() == 2);
}
