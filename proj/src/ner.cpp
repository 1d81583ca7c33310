#include "offlabel/ner.h"

#include <algorithm>

#include "offlabel/error.h"
#include "offlabel/normalizer.h"

namespace offlabel {
namespace {

std::vector<std::string> index_surfaces(const AliasIndex& index) {
  std::vector<std::string> out;
  out.reserve(index.size());
  for (const auto& [surface, entry] : index.entries()) out.push_back(surface);
  return out;
}

std::size_t token_count(std::string_view s) {
  return whitespace_tokens(s).size();
}

}  // namespace

std::string_view to_string(TextSource s) {
  return s == TextSource::kQuery ? "query" : "response";
}

std::string_view to_string(MatchKind k) {
  switch (k) {
    case MatchKind::kExact: return "exact";
    case MatchKind::kFuzzy: return "fuzzy";
    case MatchKind::kExternal: return "external";
  }
  return "exact";
}

std::vector<EntityMention> resolve_overlaps(
    std::vector<EntityMention> candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const EntityMention& a, const EntityMention& b) {
                     if (a.span.length() != b.span.length())
                       return a.span.length() > b.span.length();
                     return a.span.start < b.span.start;
                   });
  std::vector<EntityMention> kept;
  for (auto& c : candidates) {
    bool clash = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
      return k.span.overlaps(c.span);
    });
    if (!clash) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(),
            [](const EntityMention& a, const EntityMention& b) {
              return a.span.start < b.span.start;
            });
  return kept;
}

DictionaryTagger::DictionaryTagger(const AliasIndex& index)
    : automaton_(index_surfaces(index)) {
  for (const auto& [surface, entry] : index.entries()) {
    classes_.push_back(entry.entity_class);
  }
}

std::vector<EntityMention> DictionaryTagger::tag(std::string_view text,
                                                 TextSource source) const {
  std::vector<EntityMention> candidates;
  for (const auto& m : automaton_.find_all(text)) {
    if (!on_word_boundary(text, m.start, m.end)) continue;
    candidates.push_back({{m.start, m.end},
                          std::string(text.substr(m.start, m.end - m.start)),
                          classes_[m.pattern], source, MatchKind::kExact});
  }
  return resolve_overlaps(std::move(candidates));
}

FuzzyMatcher::FuzzyMatcher(const AliasIndex& index) {
  for (const auto& [surface, entry] : index.entries()) {
    std::size_t k = token_count(surface);
    if (k == 0) continue;
    if (by_tokens_.size() <= k) by_tokens_.resize(k + 1);
    by_tokens_[k].push_back({surface, entry});
  }
}

std::vector<EntityMention> FuzzyMatcher::tag(
    std::string_view text, const std::vector<EntityMention>& exact,
    int max_edit, TextSource source) const {
  if (max_edit < 1 || max_edit > 2) {
    throw ValidationError("fuzzy max_edit must be 1 or 2");
  }
  const auto limit = static_cast<std::size_t>(max_edit);
  auto tokens = whitespace_tokens(text);
  std::vector<EntityMention> candidates;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].core.length() == 0) continue;
    for (std::size_t k = 1; k < by_tokens_.size() && i + k <= tokens.size();
         ++k) {
      const Token& last = tokens[i + k - 1];
      if (last.core.length() == 0) break;
      Span span{tokens[i].core.start, last.core.end};
      // Interior tokens must be separated by single spaces.
      bool contiguous = true;
      for (std::size_t j = i + 1; j < i + k; ++j) {
        if (tokens[j].span.start != tokens[j - 1].span.end + 1 ||
            tokens[j - 1].core.end != tokens[j - 1].span.end ||
            tokens[j].core.start != tokens[j].span.start) {
          contiguous = false;
          break;
        }
      }
      if (!contiguous) break;
      if (span.length() < kMinCorrectableLength) continue;
      if (std::any_of(exact.begin(), exact.end(),
                      [&](const auto& m) { return m.span.overlaps(span); })) {
        continue;
      }
      std::string window = ascii_fold(text.substr(span.start, span.length()));

      std::size_t best = limit + 1;
      const AliasEntry* target = nullptr;
      bool ambiguous = false;
      for (const auto& e : by_tokens_[k]) {
        std::size_t d = bounded_levenshtein(window, e.surface, limit);
        if (d == 0 || d > limit) continue;
        if (d < best) {
          best = d;
          target = &e.target;
          ambiguous = false;
        } else if (d == best && !(*target == e.target)) {
          ambiguous = true;
        }
      }
      if (!target || ambiguous) continue;
      candidates.push_back({span,
                            std::string(text.substr(span.start, span.length())),
                            target->entity_class, source, MatchKind::kFuzzy});
    }
  }
  return resolve_overlaps(std::move(candidates));
}

std::vector<EntityMention> tag_entities(std::string_view text,
                                        const AliasIndex& index,
                                        TextSource source) {
  return DictionaryTagger(index).tag(text, source);
}

std::vector<EntityMention> fuzzy_tag(std::string_view text,
                                     const AliasIndex& index, int max_edit,
                                     TextSource source) {
  auto exact = tag_entities(text, index, source);
  return FuzzyMatcher(index).tag(text, exact, max_edit, source);
}

}  // namespace offlabel
