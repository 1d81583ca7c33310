#include "offlabel/aho_corasick.h"

#include <queue>

#include "offlabel/text.h"

namespace offlabel {

AhoCorasick::AhoCorasick(const std::vector<std::string>& patterns) {
  alphabet_.fill(0);
  for (const auto& p : patterns) {
    for (unsigned char c : p) {
      if (alphabet_[c] == 0) alphabet_[c] = alphabet_size_++;
    }
  }
  // Folded scanning maps upper-case text bytes onto the lower-case symbols.
  for (int c = 'A'; c <= 'Z'; ++c) alphabet_[c] = alphabet_[c - 'A' + 'a'];

  const std::size_t width = static_cast<std::size_t>(alphabet_size_);
  std::vector<std::int32_t> trie(width, -1);
  terminal_.push_back(-1);
  for (std::size_t id = 0; id < patterns.size(); ++id) {
    std::int32_t state = 0;
    for (unsigned char c : patterns[id]) {
      std::size_t slot = static_cast<std::size_t>(state) * width + symbol(c);
      if (trie[slot] < 0) {
        trie[slot] = static_cast<std::int32_t>(terminal_.size());
        terminal_.push_back(-1);
        trie.resize(trie.size() + width, -1);
      }
      state = trie[slot];
    }
    if (!patterns[id].empty() && terminal_[state] < 0) {
      terminal_[state] = static_cast<std::int32_t>(id);
    }
    lengths_.push_back(patterns[id].size());
  }

  const std::size_t n = terminal_.size();
  delta_.assign(n * width, 0);
  dict_link_.assign(n, -1);
  std::vector<std::int32_t> fail(n, 0);
  std::queue<std::int32_t> bfs;
  for (std::size_t s = 1; s < width; ++s) {
    std::int32_t child = trie[s];
    if (child >= 0) {
      delta_[s] = child;
      bfs.push(child);
    }
  }
  while (!bfs.empty()) {
    std::int32_t state = bfs.front();
    bfs.pop();
    std::int32_t f = fail[state];
    dict_link_[state] = terminal_[f] >= 0 ? f : dict_link_[f];
    for (std::size_t s = 1; s < width; ++s) {
      std::size_t slot = static_cast<std::size_t>(state) * width + s;
      std::int32_t child = trie[slot];
      std::int32_t via_fail = delta_[static_cast<std::size_t>(f) * width + s];
      if (child >= 0) {
        fail[child] = via_fail;
        delta_[slot] = child;
        bfs.push(child);
      } else {
        delta_[slot] = via_fail;
      }
    }
  }
}

std::vector<AhoCorasick::Match> AhoCorasick::find_all(
    std::string_view text) const {
  std::vector<Match> out;
  const std::size_t width = static_cast<std::size_t>(alphabet_size_);
  std::int32_t state = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    int sym = symbol(static_cast<unsigned char>(text[i]));
    state = sym == 0 ? 0 : delta_[static_cast<std::size_t>(state) * width + sym];
    for (std::int32_t s = terminal_[state] >= 0 ? state : dict_link_[state];
         s >= 0; s = dict_link_[s]) {
      std::size_t id = static_cast<std::size_t>(terminal_[s]);
      out.push_back({i + 1 - lengths_[id], i + 1, id});
    }
  }
  return out;
}

}  // namespace offlabel
