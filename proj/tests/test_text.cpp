#include <random>

#include "doctest.h"
#include "offlabel/hashing.h"
#include "offlabel/text.h"
#include "oracle.h"

using namespace offlabel;

TEST_CASE("nfc composes decomposed sequences") {
  CHECK(nfc("Cafe\xCC\x81") == "Caf\xC3\xA9");
  CHECK(nfc("plain") == "plain");
  CHECK(nfc("") == "");
}

TEST_CASE("collapse_whitespace trims and squeezes") {
  CHECK(collapse_whitespace("  a \t\n b  ") == "a b");
  CHECK(collapse_whitespace("   ") == "");
}

TEST_CASE("fold_surface lowercases ASCII only") {
  CHECK(fold_surface("  Alzheimer's   TYPE ") == "alzheimer's type");
  CHECK(fold_surface("\xC3\x89") == "\xC3\x89");
}

TEST_CASE("word boundaries") {
  std::string t = "xanxiety anxiety";
  CHECK_FALSE(on_word_boundary(t, 1, 8));
  CHECK(on_word_boundary(t, 9, 16));
  CHECK(on_word_boundary("(anxiety)", 1, 8));
}

TEST_CASE("whitespace tokens expose a punctuation-free core") {
  auto toks = whitespace_tokens("\"Hello,  world.\" ...");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].span == Span{0, 7});
  CHECK(toks[0].core == Span{1, 6});
  CHECK(toks[1].core == Span{9, 14});
  CHECK(toks[2].core.length() == 0);
}

TEST_CASE("alnum tokens") {
  CHECK(alnum_tokens("High blood-pressure!") ==
        std::vector<std::string>{"high", "blood", "pressure"});
}

TEST_CASE("levenshtein agrees with the full-matrix oracle") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> len(0, 9), ch(0, 3);
  for (int i = 0; i < 3000; ++i) {
    std::string a, b;
    for (int k = len(rng); k > 0; --k) a += static_cast<char>('a' + ch(rng));
    for (int k = len(rng); k > 0; --k) b += static_cast<char>('a' + ch(rng));
    std::size_t want = oracle::edit_distance(a, b);
    CHECK(levenshtein(a, b) == want);
    for (std::size_t limit = 0; limit <= 3; ++limit) {
      CHECK(bounded_levenshtein(a, b, limit) == std::min(want, limit + 1));
    }
  }
}

TEST_CASE("hash functions match published vectors") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("StableRng is keyed and reproducible") {
  StableRng a(7, "t001-u001", 1), b(7, "t001-u001", 1), c(7, "t001-u001", 2);
  auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(a.below(5) < 5);
  }
}
