#include <fstream>
#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "offlabel/error.h"
#include "offlabel/jsonl.h"
#include "offlabel/labeldb.h"

using namespace offlabel;

namespace {

std::set<std::string> ids(const std::vector<IndicationConcept>& cs) {
  std::set<std::string> out;
  for (const auto& c : cs) out.insert(c.concept_id);
  return out;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("table fixture loads with six products") {
  const auto& db = fixtures::sample_db();
  CHECK(db.products().size() == 6);
  CHECK(ids(approved_indications(db, "lorazepam")) ==
        std::set<std::string>{"anxiety", "status-epilepticus", "preanesthetic"});
}

TEST_CASE("approved indications per product") {
  const auto& db = fixtures::sample_db();
  CHECK(ids(approved_indications(db, "prazosin")) == std::set<std::string>{"hypertension"});
  CHECK(ids(approved_indications(db, "sildenafil")) ==
        std::set<std::string>{"erectile-dysfunction", "pulmonary-hypertension"});
  CHECK_THROWS_AS(approved_indications(db, "nonexistent"), UnknownIdError);
}

TEST_CASE("empty products file is rejected") {
  auto dir = fixtures::scratch("labeldb-empty");
  write_file(dir / "p.jsonl", "");
  auto msg = error_of([&] { load_product_db(dir / "p.jsonl", fixtures::sample("concepts.jsonl")); });
  CHECK(msg.find("empty database") != std::string::npos);
}

TEST_CASE("dangling concept reference names product and concept") {
  auto dir = fixtures::scratch("labeldb-dangling");
  write_file(dir / "p.jsonl",
             R"({"product_id": "prazosin", "name": "Prazosin", "aliases": [], )"
             R"("approved_indication_ids": ["C999"], "label_text": ""})" "\n");
  auto msg = error_of([&] { load_product_db(dir / "p.jsonl", fixtures::sample("concepts.jsonl")); });
  CHECK(msg.find("prazosin") != std::string::npos);
  CHECK(msg.find("C999") != std::string::npos);
}

TEST_CASE("alias index holds names and aliases with their class") {
  auto index = build_alias_index(fixtures::sample_db());
  const AliasEntry* lz = index.find("lorazepam");
  REQUIRE(lz);
  CHECK(lz->entity_class == EntityClass::kDrug);
  CHECK(lz->canonical_id == "lorazepam");
  const AliasEntry* ax = index.find("anxiety");
  REQUIRE(ax);
  CHECK(ax->entity_class == EntityClass::kDisease);
  CHECK(ax->canonical_id == "anxiety");
  REQUIRE(index.find("ativan"));
  CHECK(index.find("ativan")->canonical_id == "lorazepam");
  // Hand count: 6 names + 7 product aliases + 22 preferred names + 25 concept aliases.
  CHECK(index.size() == 6 + 7 + 22 + 25);
}

TEST_CASE("alias collisions across classes are errors") {
  auto db = ProductDatabase::from_records(
      {{"p", "P", {"sleep aid"}, {"c"}, ""}},
      {{"c", "condition", {"sleep aid"}}});
  CHECK_THROWS_AS(build_alias_index(db), ValidationError);
}

TEST_CASE("empty alias lists index only preferred names") {
  auto db = ProductDatabase::from_records({{"p", "Pillex", {}, {"c"}, ""}},
                                         {{"c", "Condition X", {}}});
  auto index = build_alias_index(db);
  CHECK(index.size() == 2);
  CHECK(index.find("pillex"));
  CHECK(index.find("condition x"));
}

TEST_CASE("serialize and reload yields an equal database") {
  auto dir = fixtures::scratch("labeldb-roundtrip");
  const auto& db = fixtures::full_db();
  {
    std::ofstream p(dir / "p.jsonl"), c(dir / "c.jsonl");
    write_products_jsonl(db, p);
    write_concepts_jsonl(db, c);
  }
  CHECK(load_product_db(dir / "p.jsonl", dir / "c.jsonl") == db);
}

TEST_CASE("approved sets reference known concepts and index builds are stable") {
  const auto& db = fixtures::full_db();
  for (const auto& [id, p] : db.products()) {
    for (const auto& c : approved_indications(db, id)) CHECK(db.find_concept(c.concept_id));
  }
  CHECK(build_alias_index(db) == build_alias_index(db));
}

TEST_CASE("mutated fixture lines never load silently") {
  // Each mutation breaks a record invariant; the loader must reject all.
  std::vector<std::string> products;
  {
    std::ifstream in(fixtures::sample("products.jsonl"));
    for (std::string line; std::getline(in, line);) products.push_back(line);
  }
  auto concepts = fixtures::sample("concepts.jsonl");
  std::vector<std::function<void(Json&)>> mutations = {
      [](Json& j) { j["product_id"] = ""; },
      [](Json& j) { j.erase("product_id"); },
      [](Json& j) { j["name"] = ""; },
      [](Json& j) { j["name"] = 5; },
      [](Json& j) { j["aliases"] = "x"; },
      [](Json& j) { j["aliases"].push_back(""); },
      [](Json& j) { j["aliases"].push_back(j["name"]); },
      [](Json& j) { j["approved_indication_ids"] = Json::array(); },
      [](Json& j) { j["approved_indication_ids"].push_back("no-such-concept"); },
      [](Json& j) { j["approved_indication_ids"].push_back(j["approved_indication_ids"][0]); },
      [](Json& j) { j.erase("approved_indication_ids"); },
      [](Json& j) { j = Json::array(); },
  };
  auto dir = fixtures::scratch("labeldb-mutate");
  std::mt19937 rng(3);
  int rejected = 0, total = 0;
  for (std::size_t m = 0; m < mutations.size(); ++m) {
    for (int rep = 0; rep < 4; ++rep) {
      std::size_t victim = rng() % products.size();
      std::string out;
      for (std::size_t i = 0; i < products.size(); ++i) {
        if (i == victim) {
          Json j = Json::parse(products[i]);
          mutations[m](j);
          out += j.dump() + "\n";
        } else {
          out += products[i] + "\n";
        }
      }
      write_file(dir / "p.jsonl", out);
      ++total;
      try {
        load_product_db(dir / "p.jsonl", concepts);
      } catch (const ValidationError&) {
        ++rejected;
      }
    }
  }
  CHECK(rejected == total);

  // Structural damage: truncated lines and duplicated records.
  write_file(dir / "p.jsonl", products[0].substr(0, products[0].size() / 2) + "\n");
  CHECK_THROWS_AS(load_product_db(dir / "p.jsonl", concepts), LoadError);
  write_file(dir / "p.jsonl", products[0] + "\n" + products[0] + "\n");
  CHECK_THROWS_AS(load_product_db(dir / "p.jsonl", concepts), LoadError);
}

TEST_CASE("load errors carry the line number") {
  auto dir = fixtures::scratch("labeldb-line");
  std::ifstream in(fixtures::sample("products.jsonl"));
  std::string first;
  std::getline(in, first);
  write_file(dir / "p.jsonl", first + "\n\n{not json}\n");
  try {
    load_product_db(dir / "p.jsonl", fixtures::sample("concepts.jsonl"));
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(e.line() == 3);
  }
}
