#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "offlabel/labeldb.h"

// Input standardization: Unicode/whitespace canonicalization and
// lexicon-constrained spelling correction.

namespace offlabel {

// Tokens shorter than this are never corrected.
inline constexpr std::size_t kMinCorrectableLength = 5;
inline constexpr int kMaxSupportedEdit = 2;

struct Correction {
  std::string original;
  std::string corrected;
  std::size_t offset = 0;  // byte offset of the original token core

  bool operator==(const Correction&) const = default;
};

struct NormalizedText {
  std::string text;
  std::vector<Correction> corrections;
};

// NFC, whitespace runs collapsed to one space, outer whitespace trimmed.
// Case is preserved.
std::string normalize_text(std::string_view raw);

// Token vocabulary drawn from every surface in an alias index, with a
// deletion-neighbourhood index for fast bounded edit-distance lookups.
class SpellLexicon {
 public:
  explicit SpellLexicon(const AliasIndex& index);

  bool contains(std::string_view folded_token) const {
    return tokens_.count(std::string(folded_token)) > 0;
  }
  const std::set<std::string>& tokens() const { return tokens_; }

  // The single lexicon token at minimal Levenshtein distance d, 1 <= d <=
  // max_edit. nullopt if none exists or two tokens tie.
  std::optional<std::string> unique_nearest(std::string_view folded_token,
                                            int max_edit) const;

 private:
  std::set<std::string> tokens_;
  std::vector<std::string> by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> deletes_;
};

class Corrector {
 public:
  virtual ~Corrector() = default;
  virtual NormalizedText correct(std::string_view text) const = 0;
};

class LexiconCorrector : public Corrector {
 public:
  LexiconCorrector(const SpellLexicon& lexicon, int max_edit);
  NormalizedText correct(std::string_view text) const override;

 private:
  const SpellLexicon& lexicon_;
  int max_edit_;
};

// Normalizes `text`, then replaces every token of length >=
// kMinCorrectableLength that is not in the lexicon by its unique nearest
// lexicon token within max_edit. Offsets refer to the normalized text.
NormalizedText correct_spelling(std::string_view text,
                                const SpellLexicon& lexicon, int max_edit);
NormalizedText correct_spelling(std::string_view text, const AliasIndex& index,
                                int max_edit);

}  // namespace offlabel
