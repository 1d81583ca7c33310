#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "offlabel/aho_corasick.h"
#include "offlabel/ner.h"
#include "offlabel/text.h"
#include "oracle.h"

using namespace offlabel;

namespace {

const AliasIndex& full_index() {
  static const AliasIndex index = build_alias_index(fixtures::full_db());
  return index;
}

const AliasIndex& sample_index() {
  static const AliasIndex index = build_alias_index(fixtures::sample_db());
  return index;
}

std::vector<std::string> surfaces(const AliasIndex& index) {
  std::vector<std::string> out;
  for (const auto& [s, e] : index.entries()) out.push_back(s);
  return out;
}

std::string random_case(std::string s, std::mt19937& rng) {
  for (char& c : s) {
    if (rng() % 2) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    else c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

}  // namespace

TEST_CASE("tags a drug and a disease with byte offsets") {
  auto m = tag_entities("Lorazepam is used for anxiety.", sample_index());
  REQUIRE(m.size() == 2);
  CHECK(m[0].surface == "Lorazepam");
  CHECK(m[0].span == Span{0, 9});
  CHECK(m[0].entity_class == EntityClass::kDrug);
  CHECK(m[1].surface == "anxiety");
  CHECK(m[1].span == Span{22, 29});
  CHECK(m[1].entity_class == EntityClass::kDisease);

  auto hits = oracle::scan("Lorazepam is used for anxiety.", surfaces(sample_index()));
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].start == 0);
  CHECK(hits[1].start == 22);
}

TEST_CASE("empty text has no mentions") {
  CHECK(tag_entities("", sample_index()).empty());
}

TEST_CASE("longest match wins over a contained surface") {
  auto db = ProductDatabase::from_records(
      {{"p", "Pillex", {}, {"se"}, ""}},
      {{"se", "status epilepticus", {}}, {"st", "status", {}}});
  auto index = build_alias_index(db);
  auto m = tag_entities("status epilepticus responds to it", index);
  REQUIRE(m.size() == 1);
  CHECK(m[0].surface == "status epilepticus");
  auto hits = oracle::scan("status epilepticus responds to it", {"status epilepticus", "status"});
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].surface == "status epilepticus");
}

TEST_CASE("no match inside a longer word") {
  CHECK(tag_entities("hyperanxiety and anxietyish", sample_index()).empty());
}

TEST_CASE("aho-corasick reports every occurrence") {
  AhoCorasick ac({"he", "she", "hers", "his"});
  auto found = ac.find_all("ushers");
  std::set<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& m : found) spans.insert({m.start, m.end});
  CHECK(spans == std::set<std::pair<std::size_t, std::size_t>>{{1, 4}, {2, 4}, {2, 6}});
}

TEST_CASE("fuzzy tagging recovers a one-edit drug name") {
  auto m = fuzzy_tag("quetiapin helps sleep", sample_index(), 1);
  REQUIRE(m.size() == 1);
  CHECK(m[0].surface == "quetiapin");
  CHECK(m[0].entity_class == EntityClass::kDrug);
  CHECK(m[0].kind == MatchKind::kFuzzy);
  CHECK(oracle::edit_distance("quetiapin", "quetiapine") == 1);
}

TEST_CASE("fuzzy tagging skips exact mentions and distant tokens") {
  CHECK(fuzzy_tag("Quetiapine helps insomnia.", sample_index(), 1).empty());
  // Oracle: "queti" is more than one edit from every surface.
  for (const auto& s : surfaces(sample_index())) {
    CHECK(oracle::edit_distance("queti", s) > 1);
  }
  CHECK(fuzzy_tag("queti helps", sample_index(), 1).empty());
}

TEST_CASE("fuzzy tagging covers multi-token surfaces") {
  auto m = fuzzy_tag("Try it for panik disorder today", sample_index(), 1);
  REQUIRE(m.size() == 1);
  CHECK(m[0].surface == "panik disorder");
  CHECK(m[0].entity_class == EntityClass::kDisease);
}

TEST_CASE("1000 fuzzed documents: spans valid, disjoint, case invariant, match the oracle") {
  const auto& index = full_index();
  auto surf = surfaces(index);
  // Nonsense filler cannot extend or bridge a surface.
  const std::vector<std::string> filler = {"zorp", "quix", "and", "then", "blah", ",", ".",
                                           "(", ")", "wek", "123"};
  std::mt19937 rng(20240514);
  for (int doc = 0; doc < 1000; ++doc) {
    std::string text;
    std::vector<EntityClass> planted;
    int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      if (!text.empty()) text += ' ';
      if (rng() % 2) {
        const auto& s = surf[rng() % surf.size()];
        planted.push_back(index.find(s)->entity_class);
        text += random_case(s, rng);
        text += ' ';
        text += filler[rng() % 4];
      } else {
        text += filler[rng() % filler.size()];
      }
    }

    auto m = tag_entities(text, index);
    auto hits = oracle::scan(text, surf);
    REQUIRE(m.size() == hits.size());
    CHECK(m.size() == planted.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m[i].span.start < m[i].span.end);
      CHECK(m[i].span.end <= text.size());
      CHECK(m[i].surface == text.substr(m[i].span.start, m[i].span.length()));
      CHECK(on_word_boundary(text, m[i].span.start, m[i].span.end));
      if (i > 0) CHECK(m[i - 1].span.end <= m[i].span.start);
      CHECK(m[i].span.start == hits[i].start);
      CHECK(m[i].span.end == hits[i].end);
      CHECK(m[i].entity_class == planted[i]);
      CHECK(index.find(fold_surface(m[i].surface))->entity_class == m[i].entity_class);
    }

    auto upper = tag_entities(random_case(text, rng), index);
    REQUIRE(upper.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(upper[i].span == m[i].span);
      CHECK(index.find(fold_surface(upper[i].surface))->canonical_id ==
            index.find(fold_surface(m[i].surface))->canonical_id);
    }
    CHECK(tag_entities(text, index) == m);
  }
}

TEST_CASE("random text against the brute-force scan") {
  const auto& index = sample_index();
  auto surf = surfaces(index);
  std::vector<std::string> words;
  for (const auto& s : surf) {
    for (const auto& w : alnum_tokens(s)) words.push_back(w);
  }
  std::mt19937 rng(5);
  for (int doc = 0; doc < 500; ++doc) {
    std::string text;
    int n = static_cast<int>(rng() % 15);
    for (int i = 0; i < n; ++i) {
      if (!text.empty()) text += rng() % 7 == 0 ? "-" : " ";
      text += words[rng() % words.size()];
    }
    auto m = tag_entities(text, index);
    auto hits = oracle::scan(text, surf);
    REQUIRE(m.size() == hits.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m[i].span.start == hits[i].start);
      CHECK(m[i].span.end == hits[i].end);
    }
  }
}
