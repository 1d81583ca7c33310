#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "offlabel/aho_corasick.h"
#include "offlabel/labeldb.h"
#include "offlabel/text.h"

// Drug and disease mention tagging over an alias index.

namespace offlabel {

enum class TextSource { kQuery, kResponse };
enum class MatchKind { kExact, kFuzzy, kExternal };

std::string_view to_string(TextSource s);
std::string_view to_string(MatchKind k);

struct EntityMention {
  Span span;
  std::string surface;  // exact slice of the tagged text
  EntityClass entity_class = EntityClass::kDrug;
  TextSource source = TextSource::kResponse;
  MatchKind kind = MatchKind::kExact;

  bool operator==(const EntityMention&) const = default;
};

// Keeps the longest candidates first, then the leftmost, dropping anything
// that overlaps an already kept span. Output is sorted by start.
std::vector<EntityMention> resolve_overlaps(std::vector<EntityMention> candidates);

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<EntityMention> tag(std::string_view text,
                                         TextSource source) const = 0;
};

// Exact, case-insensitive, word-boundary-aligned dictionary matching.
class DictionaryTagger : public Tagger {
 public:
  explicit DictionaryTagger(const AliasIndex& index);

  std::vector<EntityMention> tag(std::string_view text,
                                 TextSource source) const override;

 private:
  std::vector<EntityClass> classes_;
  AhoCorasick automaton_;
};

// Recovers near-miss mentions (typos) by comparing token windows against
// index surfaces with the same token count.
class FuzzyMatcher {
 public:
  explicit FuzzyMatcher(const AliasIndex& index);

  // Mentions within max_edit (1 or 2) of exactly one canonical id, not
  // overlapping any of `exact`. Windows shorter than the correctable length
  // are skipped.
  std::vector<EntityMention> tag(std::string_view text,
                                 const std::vector<EntityMention>& exact,
                                 int max_edit, TextSource source) const;

 private:
  struct Entry {
    std::string surface;
    AliasEntry target;
  };
  // Entries bucketed by token count.
  std::vector<std::vector<Entry>> by_tokens_;
};

std::vector<EntityMention> tag_entities(std::string_view text,
                                        const AliasIndex& index,
                                        TextSource source = TextSource::kResponse);

std::vector<EntityMention> fuzzy_tag(std::string_view text,
                                     const AliasIndex& index, int max_edit,
                                     TextSource source = TextSource::kResponse);

}  // namespace offlabel
