#pragma once

#include <random>
#include <string>
#include <vector>

#include "hdfa/regex.hpp"

namespace gen {

// Random pattern over a small alphabet. Patterns able to match the empty
// string are rejected and redrawn by random_pattern().
inline std::string pattern_node(std::mt19937_64& rng, const std::string& alphabet, int depth) {
  auto pick = [&] { return std::string(1, alphabet[rng() % alphabet.size()]); };
  unsigned k = depth <= 0 ? static_cast<unsigned>(rng() % 2) : static_cast<unsigned>(rng() % 9);
  switch (k) {
    case 0:
      return pick();
    case 1: {
      std::string c = "[";
      if (rng() % 3 == 0) c += "^";
      c += pick();
      if (rng() % 2) c += pick();
      return c + "]";
    }
    case 2:
    case 3:
      return pattern_node(rng, alphabet, depth - 1) + pattern_node(rng, alphabet, depth - 1);
    case 4:
      return "(" + pattern_node(rng, alphabet, depth - 1) + "|" + pattern_node(rng, alphabet, depth - 1) + ")";
    case 5:
      return "(" + pattern_node(rng, alphabet, depth - 1) + ")*";
    case 6:
      return "(" + pattern_node(rng, alphabet, depth - 1) + ")+";
    case 7:
      return "(" + pattern_node(rng, alphabet, depth - 1) + ")?";
    default: {
      unsigned lo = static_cast<unsigned>(rng() % 3), hi = lo + static_cast<unsigned>(rng() % 3);
      return "(" + pattern_node(rng, alphabet, depth - 1) + "){" + std::to_string(lo) + "," + std::to_string(hi) + "}";
    }
  }
}

inline std::string random_pattern(std::mt19937_64& rng, const std::string& alphabet, int depth = 3) {
  for (;;) {
    std::string p = pattern_node(rng, alphabet, depth);
    if (!hdfa::matches_empty(hdfa::parse_pattern(p))) return p;
  }
}

inline std::vector<std::string> random_pattern_set(std::mt19937_64& rng, const std::string& alphabet,
                                                   std::size_t max_count = 3, int depth = 3) {
  std::vector<std::string> out(1 + rng() % max_count);
  for (auto& p : out) p = random_pattern(rng, alphabet, depth);
  return out;
}

inline std::string random_text(std::mt19937_64& rng, const std::string& alphabet, std::size_t len) {
  std::string s(len, ' ');
  for (auto& c : s) c = alphabet[rng() % alphabet.size()];
  return s;
}

// Calls f(text) for every string over `alphabet` of length 0..max_len.
template <class F>
void for_each_string(const std::string& alphabet, std::size_t max_len, F&& f) {
  std::string s;
  auto rec = [&](auto&& self, std::size_t len) -> void {
    if (s.size() == len) {
      f(static_cast<const std::string&>(s));
      return;
    }
    for (char c : alphabet) {
      s.push_back(c);
      self(self, len);
      s.pop_back();
    }
  };
  for (std::size_t len = 0; len <= max_len; ++len) rec(rec, len);
}

}  // namespace gen
