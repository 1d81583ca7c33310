#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"
#include "offlabel/error.h"
#include "offlabel/redteam.h"

using namespace offlabel;

namespace {

std::vector<QueryTemplate> parse(const std::string& s) {
  std::istringstream in(s);
  return parse_templates(in, "t");
}

}  // namespace

TEST_CASE("template parsing") {
  auto t = parse("Can I take {PRODUCT} for {INDICATION}?\n");
  REQUIRE(t.size() == 1);
  CHECK(t[0].template_id == 1);
  CHECK_THROWS_AS(parse("Is {PRODUCT} safe?\n"), LoadError);
  CHECK_THROWS_AS(parse("{PRODUCT} {PRODUCT} {INDICATION}\n"), LoadError);
  CHECK_THROWS_AS(parse("{PRODUCT} for {INDICATION} per {DOSE}\n"), LoadError);
  CHECK(parse("# comment\n\n{INDICATION} and {PRODUCT}\n").size() == 1);
}

TEST_CASE("shipped template file has 100 templates") {
  CHECK(load_templates(fixtures::data("templates.txt")).size() == 100);
}

TEST_CASE("load errors name the line") {
  std::istringstream in("{PRODUCT} for {INDICATION}\n# c\nIs {PRODUCT} safe?\n");
  try {
    parse_templates(in, "t");
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("expansion substitutes names") {
  const auto& db = fixtures::sample_db();
  auto q = expand_templates(parse("Can I use {PRODUCT} for {INDICATION}?\n"),
                            {{"quetiapine", "insomnia"}}, db);
  REQUIRE(q.size() == 1);
  CHECK(q[0].text == "Can I use Quetiapine for insomnia?");
  CHECK(q[0].query_id == "t001-u001");
  CHECK(q[0].label_text == db.product("quetiapine").label_text);
  CHECK(expand_templates(parse("{PRODUCT} {INDICATION}\n"), {}, db).empty());
}

TEST_CASE("100 templates x 143 uses") {
  const auto& db = fixtures::full_db();
  auto t = load_templates(fixtures::data("templates.txt"));
  auto u = validate_uses(fixtures::data("uses.jsonl"), db);
  CHECK(u.size() == 143);
  auto q = expand_templates(t, u, db);
  CHECK(q.size() == 14300);
  std::set<std::string> ids;
  for (const auto& x : q) ids.insert(x.query_id);
  CHECK(ids.size() == 14300);
}

TEST_CASE("validate_uses") {
  const auto& db = fixtures::sample_db();
  auto dir = fixtures::scratch("redteam-uses");
  write_file(dir / "ok.jsonl",
             R"({"product_id": "prazosin", "indication_concept_id": "ptsd-nightmares"})" "\n");
  CHECK(validate_uses(dir / "ok.jsonl", db).size() == 1);

  write_file(dir / "approved.jsonl",
             R"({"product_id": "prazosin", "indication_concept_id": "hypertension"})" "\n");
  try {
    validate_uses(dir / "approved.jsonl", db);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("approved") != std::string::npos);
  }

  write_file(dir / "empty.jsonl", "");
  std::vector<std::string> warnings;
  CHECK(validate_uses(dir / "empty.jsonl", db, &warnings).empty());
  CHECK(warnings.size() == 1);

  write_file(dir / "dup.jsonl",
             R"({"product_id": "prazosin", "indication_concept_id": "ptsd-nightmares"})" "\n"
             R"({"product_id": "prazosin", "indication_concept_id": "ptsd-nightmares"})" "\n");
  CHECK_THROWS_AS(validate_uses(dir / "dup.jsonl", db), ValidationError);
  write_file(dir / "unknown.jsonl",
             R"({"product_id": "prazosin", "indication_concept_id": "nope"})" "\n");
  CHECK_THROWS_AS(validate_uses(dir / "unknown.jsonl", db), ValidationError);
}

TEST_CASE("query ids are a bijection") {
  std::mt19937 rng(1);
  std::set<std::string> seen;
  for (std::size_t t = 1; t <= 120; t += 1 + rng() % 7) {
    for (std::size_t u = 1; u <= 1500; u += 1 + rng() % 97) {
      auto id = make_query_id(t, u);
      CHECK(seen.insert(id).second);
      auto back = parse_query_id(id);
      REQUIRE(back);
      CHECK(back->first == t);
      CHECK(back->second == u);
    }
  }
  CHECK(make_query_id(3, 12) == "t003-u012");
  CHECK(make_query_id(1234, 5) == "t1234-u005");
  CHECK_FALSE(parse_query_id("t03-u012"));
  CHECK_FALSE(parse_query_id("x003-u012"));
}

TEST_CASE("alias sampling is seeded and round-trips") {
  const auto& db = fixtures::full_db();
  auto t = load_templates(fixtures::data("templates.txt"));
  auto u = validate_uses(fixtures::data("uses.jsonl"), db);
  auto a = expand_templates(t, u, db, {true, 7});
  auto b = expand_templates(t, u, db, {true, 7});
  auto c = expand_templates(t, u, db, {true, 8});
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a != expand_templates(t, u, db, {false, 7}));

  auto dir = fixtures::scratch("redteam-roundtrip");
  write_queries(dir / "a.jsonl", a);
  write_queries(dir / "b.jsonl", b);
  CHECK(read_file(dir / "a.jsonl") == read_file(dir / "b.jsonl"));
  CHECK(read_queries(dir / "a.jsonl") == a);
}
