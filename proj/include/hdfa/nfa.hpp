#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hdfa/regex.hpp"

namespace hdfa {

using PatternId = std::uint32_t;
using NfaStateId = std::uint32_t;

inline constexpr std::size_t kDefaultMaxNfaStates = 1'000'000;

struct NfaEdge {
  ByteSet bytes;
  NfaStateId target;
};

/// Thompson automaton with epsilon edges and byte-set labelled edges.
struct Nfa {
  struct State {
    std::vector<NfaStateId> epsilon;
    std::vector<NfaEdge> edges;
    std::optional<PatternId> accept;
  };

  std::vector<State> states;
  NfaStateId start = 0;

  std::size_t state_count() const noexcept { return states.size(); }
};

/// Thompson construction of one pattern. The result has a single accept
/// state tagged with `id`. Throws CapacityError past `max_states`.
Nfa build_nfa(const SyntaxTree& tree, PatternId id, std::size_t max_states = kDefaultMaxNfaStates);

/// Union of several NFAs under a fresh start state; accept tags are kept.
Nfa union_nfa(std::span<const Nfa> parts, std::size_t max_states = kDefaultMaxNfaStates);

/// Epsilon closure of `seeds`, returned sorted.
std::vector<NfaStateId> epsilon_closure(const Nfa& nfa, std::span<const NfaStateId> seeds);

}  // namespace hdfa
