#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace offlabel {

// Byte-level Aho-Corasick automaton compiled to a dense DFA over the
// alphabet actually used by the patterns. Text is ASCII-lowercased while
// scanning, so patterns should be supplied already folded.
class AhoCorasick {
 public:
  struct Match {
    std::size_t start;
    std::size_t end;
    std::size_t pattern;  // index in insertion order
  };

  explicit AhoCorasick(const std::vector<std::string>& patterns);

  std::vector<Match> find_all(std::string_view text) const;

  std::size_t pattern_count() const { return lengths_.size(); }
  std::size_t state_count() const { return terminal_.size(); }

 private:
  int symbol(unsigned char c) const { return alphabet_[c]; }

  std::array<int, 256> alphabet_{};
  int alphabet_size_ = 1;  // symbol 0 is "not in any pattern"
  std::vector<std::int32_t> delta_;      // state * alphabet_size_ + symbol
  std::vector<std::int32_t> terminal_;   // pattern id ending here, or -1
  std::vector<std::int32_t> dict_link_;  // next terminal state on fail chain
  std::vector<std::size_t> lengths_;
};

}  // namespace offlabel
