#include <catch2/catch_amalgamated.hpp>

#include "grepctx/external.hpp"
#include "grepctx/querygen.hpp"

using namespace grepctx;

namespace {

const ClassifiedIdentifier* find_id(const std::vector<ClassifiedIdentifier>& ids,
                                    const std::string& name) {
  for (const auto& id : ids)
    if (id.name == name) return &id;
  return nullptr;
}

CompletionTask py_task(const std::string& context) {
  CompletionTask t;
  t.task_id = "t1";
  t.language = Language::python;
  t.local_context = context;
  return t;
}

}  // namespace

TEST_CASE("method receiver pattern: self.deck.draw(") {
  auto ids = extract_identifiers("card = self.deck.draw(", Language::python);
  const auto* draw = find_id(ids, "draw");
  const auto* deck = find_id(ids, "deck");
  REQUIRE(draw != nullptr);
  CHECK(draw->kind == KeywordKind::method_name);
  REQUIRE(deck != nullptr);
  CHECK(deck->kind == KeywordKind::variable_name);
  CHECK(find_id(ids, "self") == nullptr);
}

TEST_CASE("class annotation near the cursor surfaces the class name") {
  auto ids = extract_identifiers("deck: Deck = self.deck\ncard = self.deck.draw(",
                                 Language::python);
  const auto* cls = find_id(ids, "Deck");
  REQUIRE(cls != nullptr);
  CHECK(cls->kind == KeywordKind::class_name);
}

TEST_CASE("class C extends P yields two class names") {
  auto ids = extract_identifiers("class C extends P {", Language::java);
  const auto* c = find_id(ids, "C");
  const auto* p = find_id(ids, "P");
  REQUIRE(c != nullptr);
  REQUIRE(p != nullptr);
  CHECK(c->kind == KeywordKind::class_name);
  CHECK(p->kind == KeywordKind::class_name);
}

TEST_CASE("single assignment yields a variable") {
  auto ids = extract_identifiers("x = 1", Language::python);
  REQUIRE(ids.size() == 1);
  CHECK(ids[0].name == "x");
  CHECK(ids[0].kind == KeywordKind::variable_name);
  CHECK(find_id(ids, "1") == nullptr);
}

TEST_CASE("quoted strings classify as other") {
  auto ids = extract_identifiers("path = \"config_dir\"", Language::python);
  const auto* other = find_id(ids, "config_dir");
  REQUIRE(other != nullptr);
  CHECK(other->kind == KeywordKind::other);
}

TEST_CASE("identifiers ordered nearest to the cursor first") {
  auto ids = extract_identifiers("alpha = 1\nbeta = 2\ngamma = 3", Language::python);
  REQUIRE(ids.size() == 3);
  CHECK(ids[0].name == "gamma");
  CHECK(ids[2].name == "alpha");
}

TEST_CASE("window limits how far back identifiers are collected") {
  std::string ctx = "far_away = 0\n";
  for (int i = 0; i < 25; ++i) ctx += "\n";
  ctx += "near = 1";
  auto ids = extract_identifiers(ctx, Language::python, 20);
  CHECK(find_id(ids, "far_away") == nullptr);
  CHECK(find_id(ids, "near") != nullptr);
}

TEST_CASE("generate_queries builds definition and call patterns") {
  auto qs = generate_queries(py_task("deck: Deck = make()\ncard = self.deck.draw("), 10);
  REQUIRE(!qs.queries.empty());
  bool has_class_deck = false, has_draw_call = false;
  for (const auto& q : qs.queries) {
    if (q.pattern == "class Deck") has_class_deck = true;
    if (q.pattern == "draw\\(") has_draw_call = true;
  }
  CHECK(has_class_deck);
  CHECK(has_draw_call);
  for (const auto& q : qs.queries) CHECK(detail::pattern_compiles(q.pattern));
}

TEST_CASE("cardinality bound and wildcard variants when undersubscribed") {
  auto qs = generate_queries(py_task("config_model = ConfigModel()"), 10);
  CHECK(qs.queries.size() <= 10);
  bool has_wildcard = false;
  for (const auto& q : qs.queries) {
    CHECK(!q.pattern.empty());
    if (q.pattern == "class.*ConfigModel") {
      has_wildcard = true;
      CHECK(q.uses_wildcard);
    }
  }
  CHECK(has_wildcard);
}

TEST_CASE("m caps the query count") {
  auto qs = generate_queries(py_task("a = 1\nb = 2\nc = 3\nd = 4\ne = 5\nf = 6"), 3);
  CHECK(qs.queries.size() == 3);
}

TEST_CASE("empty identifier yield gives an empty query set") {
  auto qs = generate_queries(py_task("   \n  "), 10);
  CHECK(qs.queries.empty());
}

TEST_CASE("generate_queries is deterministic") {
  auto t = py_task("deck: Deck = make()\ncard = self.deck.draw(");
  auto a = generate_queries(t, 10);
  auto b = generate_queries(t, 10);
  REQUIRE(a.queries.size() == b.queries.size());
  for (std::size_t i = 0; i < a.queries.size(); ++i) {
    CHECK(a.queries[i].pattern == b.queries[i].pattern);
    CHECK(a.queries[i].kind == b.queries[i].kind);
  }
}

TEST_CASE("query ids are unique within a set") {
  auto qs = generate_queries(py_task("deck: Deck = make()\ncard = self.deck.draw("), 10);
  std::set<std::string> ids;
  for (const auto& q : qs.queries) CHECK(ids.insert(q.query_id).second);
}

TEST_CASE("uses_wildcard tracks non-literal patterns") {
  CHECK(detail::is_literal_pattern("class Deck"));
  CHECK(detail::is_literal_pattern("draw\\("));
  CHECK(detail::literal_of("draw\\(") == "draw(");
  CHECK(!detail::is_literal_pattern("class.*ConfigModel"));
  CHECK(!detail::is_literal_pattern("\\bdraw\\b"));
}

TEST_CASE("parse_external_queries maps valid payloads") {
  ExternalResponse resp;
  resp.task_id = "t9";
  resp.commands = {{"Deck", true}, {"def draw", true}};
  auto qs = parse_external_queries("t9", resp, 10);
  CHECK(qs.source == GeneratorSource::external);
  REQUIRE(qs.queries.size() == 2);
  CHECK(qs.queries[0].pattern == "Deck");
  CHECK(qs.queries[1].pattern == "def draw");
}

TEST_CASE("parse_external_queries enforces m and drops bad regexes") {
  ExternalResponse resp;
  resp.task_id = "t9";
  for (int i = 0; i < 12; ++i) resp.commands.push_back({"p" + std::to_string(i), true});
  auto qs = parse_external_queries("t9", resp, 10);
  CHECK(qs.queries.size() == 10);
  CHECK(qs.queries[0].pattern == "p0");

  ExternalResponse bad;
  bad.task_id = "t9";
  bad.commands = {{"good", true}, {"([unclosed", true}, {"also_good", true}};
  std::vector<std::string> warnings;
  auto qs2 = parse_external_queries("t9", bad, 10, &warnings);
  CHECK(qs2.queries.size() == 2);
  CHECK(warnings.size() == 1);
}

TEST_CASE("external wire protocol round trip") {
  CompletionTask t = py_task("x = f(");
  t.task_id = "w1";
  auto req = nlohmann::json::parse(external_request_json(t, 10));
  CHECK(req["task_id"] == "w1");
  CHECK(req["local_context"] == "x = f(");
  CHECK(req["language"] == "python");
  CHECK(req["m"] == 10);

  auto resp = parse_external_response(
      R"({"task_id": "w1", "commands": [{"pattern": "Deck", "case_sensitive": false}]})");
  CHECK(resp.task_id == "w1");
  REQUIRE(resp.commands.size() == 1);
  CHECK(resp.commands[0].pattern == "Deck");
  CHECK(!resp.commands[0].case_sensitive);

  CHECK_THROWS_AS(parse_external_response("{not json"), std::runtime_error);
  CHECK_THROWS_AS(parse_external_response(R"({"task_id": "w1"})"), std::runtime_error);
  CHECK_THROWS_AS(parse_external_response(R"({"task_id": "w1", "commands": [42]})"),
                  std::runtime_error);
}

#ifdef __unix__
TEST_CASE("subprocess bridge exchanges one line per task") {
  CompletionTask t = py_task("card = deck.draw(");
  t.task_id = "sub1";
  // Echo generator: reads the request, answers with a fixed command list.
  std::string cmd =
      "python3 -c \"import sys, json; req = json.loads(sys.stdin.readline()); "
      "print(json.dumps({'task_id': req['task_id'], 'commands': "
      "[{'pattern': 'Deck', 'case_sensitive': True}]}))\"";
  auto qs = fetch_external_queries_subprocess(cmd, t, 10);
  CHECK(qs.source == GeneratorSource::external);
  REQUIRE(qs.queries.size() == 1);
  CHECK(qs.queries[0].pattern == "Deck");
}
#endif
