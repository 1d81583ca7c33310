#include "offlabel/text.h"

#include <algorithm>
#include <numeric>

#include <unicode/errorcode.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace offlabel {

std::string ascii_fold(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

std::string nfc(std::string_view s) {
  bool ascii = std::all_of(s.begin(), s.end(), [](char c) {
    return static_cast<unsigned char>(c) < 0x80;
  });
  if (ascii) return std::string(s);

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer =
      icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) return std::string(s);
  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  icu::UnicodeString composed = normalizer->normalize(input, status);
  if (U_FAILURE(status)) return std::string(s);
  std::string out;
  composed.toUTF8String(out);
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

std::string fold_surface(std::string_view s) {
  return ascii_fold(collapse_whitespace(nfc(s)));
}

bool on_word_boundary(std::string_view text, std::size_t start,
                      std::size_t end) {
  if (start >= end || end > text.size()) return false;
  auto uc = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  bool left_ok = start == 0 || !is_word_char(uc(start - 1)) ||
                 !is_word_char(uc(start));
  bool right_ok = end == text.size() || !is_word_char(uc(end)) ||
                  !is_word_char(uc(end - 1));
  return left_ok && right_ok;
}

std::vector<Token> whitespace_tokens(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i])))
      ++i;
    if (i == text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i])))
      ++i;
    Token tok{{start, i}, {start, start}};
    std::size_t a = start, b = i;
    while (a < b && !is_word_char(static_cast<unsigned char>(text[a]))) ++a;
    while (b > a && !is_word_char(static_cast<unsigned char>(text[b - 1]))) --b;
    if (a < b) tok.core = {a, b};
    tokens.push_back(tok);
  }
  return tokens;
}

std::vector<std::string> alnum_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_word_char(static_cast<unsigned char>(c))) {
      cur.push_back(ascii_lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return bounded_levenshtein(a, b, std::max(a.size(), b.size()));
}

std::size_t bounded_levenshtein(std::string_view a, std::string_view b,
                                std::size_t limit) {
  if (a.size() < b.size()) std::swap(a, b);
  if (a.size() - b.size() > limit) return limit + 1;
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    std::size_t row_min = row[0];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = up;
      row_min = std::min(row_min, row[j]);
    }
    if (row_min > limit) return limit + 1;
  }
  return std::min(row[b.size()], limit + 1);
}

}  // namespace offlabel
