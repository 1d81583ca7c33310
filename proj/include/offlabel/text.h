#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Byte-level text helpers shared by every pipeline stage. Offsets are UTF-8
// byte offsets. Case folding is ASCII-only so it never changes byte lengths.

namespace offlabel {

// Half-open byte interval [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  bool operator==(const Span&) const = default;
};

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Alphanumeric ASCII, or any byte of a multi-byte UTF-8 sequence.
inline bool is_word_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string ascii_fold(std::string_view s);

// Canonical composition (NFC). Invalid UTF-8 is replaced by U+FFFD.
std::string nfc(std::string_view s);

// Trims outer whitespace and collapses internal runs to one space.
std::string collapse_whitespace(std::string_view s);

// The key used for every alias lookup: NFC, collapsed whitespace, ASCII fold.
std::string fold_surface(std::string_view s);

// True if [start, end) of text starts and ends on a word boundary.
bool on_word_boundary(std::string_view text, std::size_t start,
                      std::size_t end);

// Whitespace-delimited token with its surrounding punctuation stripped.
struct Token {
  Span span;       // the token including punctuation
  Span core;       // the stripped core; empty if the token is all punctuation
};

std::vector<Token> whitespace_tokens(std::string_view text);

// Maximal alphanumeric runs, ASCII-folded. Used for embedding lookups.
std::vector<std::string> alnum_tokens(std::string_view text);

// Unit-cost Levenshtein distance (insert, delete, substitute) over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Same metric, but gives up once the distance is known to exceed `limit`,
// returning limit + 1.
std::size_t bounded_levenshtein(std::string_view a, std::string_view b,
                                std::size_t limit);

}  // namespace offlabel
