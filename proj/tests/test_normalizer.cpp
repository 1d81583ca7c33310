#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "offlabel/normalizer.h"
#include "offlabel/text.h"
#include "oracle.h"

using namespace offlabel;

namespace {

const AliasIndex& sample_index() {
  static const AliasIndex index = build_alias_index(fixtures::sample_db());
  return index;
}

const SpellLexicon& sample_lexicon() {
  static const SpellLexicon lex(sample_index());
  return lex;
}

std::string mutate(std::string w, std::mt19937& rng, int edits) {
  for (int e = 0; e < edits && !w.empty(); ++e) {
    std::size_t pos = rng() % w.size();
    char letter = static_cast<char>('a' + rng() % 26);
    switch (rng() % 3) {
      case 0: w[pos] = letter; break;
      case 1: w.erase(pos, 1); break;
      default: w.insert(w.begin() + static_cast<long>(pos), letter); break;
    }
  }
  return w;
}

std::string random_text(std::mt19937& rng, const std::vector<std::string>& vocab, int max_edits) {
  static const std::vector<std::string> filler = {"can", "the", "patient", "take", "for",
                                                  "really", "which", "dosage", "helps"};
  std::string text;
  int n = 3 + static_cast<int>(rng() % 8);
  for (int i = 0; i < n; ++i) {
    if (!text.empty()) text += rng() % 5 == 0 ? "  " : " ";
    std::string w = rng() % 2 ? vocab[rng() % vocab.size()] : filler[rng() % filler.size()];
    if (rng() % 3 == 0) w = mutate(w, rng, 1 + static_cast<int>(rng() % max_edits));
    if (rng() % 4 == 0 && !w.empty()) w[0] = static_cast<char>(std::toupper(w[0]));
    text += w;
    if (rng() % 6 == 0) text += ",";
  }
  return text;
}

}  // namespace

TEST_CASE("normalize_text") {
  CHECK(normalize_text("  Can I   use Prazosin? ") == "Can I use Prazosin?");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text("Cafe\xCC\x81 au lait") == "Caf\xC3\xA9 au lait");
}

TEST_CASE("correct_spelling fixes a one-edit drug name") {
  // Oracle: "lorazepam" is the only lexicon token within distance 2.
  auto n = oracle::nearest("lorazpam", sample_lexicon().tokens());
  CHECK(n.distance == 1);
  CHECK(n.tokens == std::vector<std::string>{"lorazepam"});

  auto r = correct_spelling("can lorazpam treat insomnia", sample_index(), 2);
  CHECK(r.text == "can lorazepam treat insomnia");
  REQUIRE(r.corrections.size() == 1);
  CHECK(r.corrections[0] == Correction{"lorazpam", "lorazepam", 4});
}

TEST_CASE("correct_spelling keeps the rest of the text") {
  auto n = oracle::nearest("sildenafill", sample_lexicon().tokens());
  CHECK(n.distance == 1);
  CHECK(n.tokens.size() == 1);
  auto r = correct_spelling("sildenafill for altitude sickness", sample_index(), 2);
  CHECK(r.text == "sildenafil for altitude sickness");
}

TEST_CASE("lexicon tokens are left alone") {
  auto r = correct_spelling("anxiety", sample_index(), 2);
  CHECK(r.text == "anxiety");
  CHECK(r.corrections.empty());
}

TEST_CASE("case pattern is carried over") {
  auto r = correct_spelling("Lorazpam helps. QUETIAPNE too", sample_index(), 1);
  CHECK(r.text == "Lorazepam helps. QUETIAPINE too");
}

TEST_CASE("short tokens are never corrected") {
  auto r = correct_spelling("ocdd bph", sample_index(), 2);
  CHECK(r.corrections.empty());
}

TEST_CASE("unique_nearest refuses ties") {
  auto index = build_alias_index(ProductDatabase::from_records(
      {{"p", "Drugone", {}, {"a"}, ""}}, {{"a", "flashes", {}}, {"b", "flares", {}}}));
  SpellLexicon lex(index);
  CHECK_FALSE(lex.unique_nearest("flases", 1).has_value());
  CHECK(lex.unique_nearest("flashs", 1) == std::optional<std::string>("flashes"));
}

TEST_CASE("corrections agree with the quadratic edit-distance oracle") {
  const auto& lex = sample_lexicon();
  std::vector<std::string> vocab(lex.tokens().begin(), lex.tokens().end());
  std::mt19937 rng(2024);
  for (int max_edit = 1; max_edit <= 2; ++max_edit) {
    for (int doc = 0; doc < 400; ++doc) {
      std::string raw = random_text(rng, vocab, 2);
      auto r = correct_spelling(raw, lex, max_edit);
      std::string norm = normalize_text(raw);

      std::set<std::size_t> corrected_at;
      for (const auto& c : r.corrections) {
        corrected_at.insert(c.offset);
        std::string orig = oracle::lower(c.original);
        CHECK(norm.substr(c.offset, c.original.size()) == c.original);
        CHECK_FALSE(lex.contains(orig));
        CHECK(lex.contains(oracle::lower(c.corrected)));
        auto n = oracle::nearest(orig, lex.tokens());
        CHECK(n.distance >= 1);
        CHECK(n.distance <= static_cast<std::size_t>(max_edit));
        REQUIRE(n.tokens.size() == 1);
        CHECK(n.tokens[0] == oracle::lower(c.corrected));
      }
      // Every uncorrected long token is either known, or has no unique
      // neighbour within max_edit.
      for (const auto& t : whitespace_tokens(norm)) {
        if (t.core.length() < kMinCorrectableLength || corrected_at.count(t.core.start)) continue;
        std::string w = oracle::lower(norm.substr(t.core.start, t.core.length()));
        if (lex.contains(w)) continue;
        auto n = oracle::nearest(w, lex.tokens());
        bool correctable = n.distance <= static_cast<std::size_t>(max_edit) && n.tokens.size() == 1;
        CHECK_MESSAGE(!correctable, w);
      }
    }
  }
}

TEST_CASE("correction is idempotent and max_edit 0 is the identity") {
  const auto& lex = sample_lexicon();
  std::vector<std::string> vocab(lex.tokens().begin(), lex.tokens().end());
  std::mt19937 rng(99);
  for (int doc = 0; doc < 300; ++doc) {
    std::string raw = random_text(rng, vocab, 2);
    for (int max_edit = 0; max_edit <= 2; ++max_edit) {
      auto once = correct_spelling(normalize_text(raw), lex, max_edit);
      auto twice = correct_spelling(once.text, lex, max_edit);
      CHECK(twice.text == once.text);
    }
    auto zero = correct_spelling(raw, lex, 0);
    CHECK(zero.text == normalize_text(raw));
    CHECK(zero.corrections.empty());
  }
}
