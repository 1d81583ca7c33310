#include "offlabel/normalizer.h"

#include <algorithm>
#include <unordered_set>

#include "offlabel/error.h"
#include "offlabel/text.h"

namespace offlabel {
namespace {

void collect_deletes(const std::string& word, int depth,
                     std::unordered_set<std::string>& out) {
  if (depth == 0 || word.empty()) return;
  for (std::size_t i = 0; i < word.size(); ++i) {
    std::string shorter = word.substr(0, i) + word.substr(i + 1);
    if (out.insert(shorter).second) collect_deletes(shorter, depth - 1, out);
  }
}

// Applies the capitalization pattern of `original` to a folded replacement.
std::string match_case(std::string_view original, std::string corrected) {
  bool has_alpha = false, all_upper = true;
  for (char c : original) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      has_alpha = true;
      if (c >= 'a' && c <= 'z') all_upper = false;
    }
  }
  if (has_alpha && all_upper && original.size() > 1) {
    for (char& c : corrected) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
  } else if (!original.empty() && original[0] >= 'A' && original[0] <= 'Z' &&
             !corrected.empty() && corrected[0] >= 'a' && corrected[0] <= 'z') {
    corrected[0] = static_cast<char>(corrected[0] - 'a' + 'A');
  }
  return corrected;
}

}  // namespace

std::string normalize_text(std::string_view raw) {
  return collapse_whitespace(nfc(raw));
}

SpellLexicon::SpellLexicon(const AliasIndex& index) {
  for (const auto& [surface, entry] : index.entries()) {
    for (const auto& tok : whitespace_tokens(surface)) {
      if (tok.core.length() == 0) continue;
      tokens_.insert(surface.substr(tok.core.start, tok.core.length()));
    }
  }
  by_id_.assign(tokens_.begin(), tokens_.end());
  for (std::size_t id = 0; id < by_id_.size(); ++id) {
    std::unordered_set<std::string> variants{by_id_[id]};
    collect_deletes(by_id_[id], kMaxSupportedEdit, variants);
    for (const auto& v : variants) deletes_[v].push_back(id);
  }
}

std::optional<std::string> SpellLexicon::unique_nearest(
    std::string_view folded_token, int max_edit) const {
  if (max_edit <= 0) return std::nullopt;
  max_edit = std::min(max_edit, kMaxSupportedEdit);
  std::string word(folded_token);
  std::unordered_set<std::string> variants{word};
  collect_deletes(word, max_edit, variants);

  std::unordered_set<std::size_t> candidates;
  for (const auto& v : variants) {
    auto it = deletes_.find(v);
    if (it == deletes_.end()) continue;
    candidates.insert(it->second.begin(), it->second.end());
  }

  std::size_t best = static_cast<std::size_t>(max_edit) + 1;
  const std::string* best_token = nullptr;
  bool tie = false;
  for (std::size_t id : candidates) {
    const std::string& cand = by_id_[id];
    std::size_t d =
        bounded_levenshtein(word, cand, static_cast<std::size_t>(max_edit));
    if (d == 0 || d > static_cast<std::size_t>(max_edit)) continue;
    if (d < best) {
      best = d;
      best_token = &cand;
      tie = false;
    } else if (d == best) {
      tie = true;
    }
  }
  if (!best_token || tie) return std::nullopt;
  return *best_token;
}

LexiconCorrector::LexiconCorrector(const SpellLexicon& lexicon, int max_edit)
    : lexicon_(lexicon), max_edit_(max_edit) {
  if (max_edit < 0 || max_edit > kMaxSupportedEdit) {
    throw ValidationError("max_edit must be 0, 1 or 2");
  }
}

NormalizedText LexiconCorrector::correct(std::string_view text) const {
  return correct_spelling(text, lexicon_, max_edit_);
}

NormalizedText correct_spelling(std::string_view text,
                                const SpellLexicon& lexicon, int max_edit) {
  if (max_edit < 0 || max_edit > kMaxSupportedEdit) {
    throw ValidationError("max_edit must be 0, 1 or 2");
  }
  NormalizedText result;
  std::string normalized = normalize_text(text);
  if (max_edit == 0) {
    result.text = std::move(normalized);
    return result;
  }

  std::string out;
  out.reserve(normalized.size());
  std::size_t copied = 0;
  for (const auto& tok : whitespace_tokens(normalized)) {
    if (tok.core.length() < kMinCorrectableLength) continue;
    std::string_view core(normalized.data() + tok.core.start,
                          tok.core.length());
    std::string folded = ascii_fold(core);
    if (lexicon.contains(folded)) continue;
    auto replacement = lexicon.unique_nearest(folded, max_edit);
    if (!replacement) continue;
    std::string fixed = match_case(core, *replacement);
    out.append(normalized, copied, tok.core.start - copied);
    out.append(fixed);
    copied = tok.core.end;
    result.corrections.push_back({std::string(core), fixed, tok.core.start});
  }
  out.append(normalized, copied, std::string::npos);
  result.text = std::move(out);
  return result;
}

NormalizedText correct_spelling(std::string_view text, const AliasIndex& index,
                                int max_edit) {
  SpellLexicon lexicon(index);
  return correct_spelling(text, lexicon, max_edit);
}

}  // namespace offlabel
