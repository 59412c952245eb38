#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdfa/nfa.hpp"

namespace hdfa {

using StateId = std::uint32_t;

inline constexpr std::size_t kAlphabetSize = 256;
inline constexpr std::size_t kDefaultMaxDfaStates = 250'000;

/// Total, byte-oriented deterministic automaton.
///
/// States are 0..n-1, the transition function is stored row-major as
/// n x 256 successor ids, and every state maps to a (possibly empty) sorted
/// set of pattern ids it accepts. Construction validates totality, id
/// ranges and reachability of every state from the start state.
class Dfa {
 public:
  Dfa(std::vector<StateId> transitions, StateId start, std::vector<std::vector<PatternId>> accepts);

  std::size_t state_count() const noexcept { return accepts_.size(); }
  StateId start() const noexcept { return start_; }

  StateId next(StateId s, std::uint8_t b) const noexcept {
    return transitions_[static_cast<std::size_t>(s) * kAlphabetSize + b];
  }
  std::span<const StateId> row(StateId s) const noexcept {
    return {transitions_.data() + static_cast<std::size_t>(s) * kAlphabetSize, kAlphabetSize};
  }
  std::span<const StateId> transitions() const noexcept { return transitions_; }

  std::span<const PatternId> accepts(StateId s) const noexcept { return accepts_[s]; }
  bool is_accept(StateId s) const noexcept { return !accepts_[s].empty(); }

  /// One more than the largest pattern id mentioned by any accept state.
  std::size_t pattern_count() const noexcept;

  friend bool operator==(const Dfa&, const Dfa&) = default;

 private:
  std::vector<StateId> transitions_;
  StateId start_;
  std::vector<std::vector<PatternId>> accepts_;
};

struct CompileConfig {
  std::size_t max_nfa_states = kDefaultMaxNfaStates;
  std::size_t max_dfa_states = kDefaultMaxDfaStates;
  bool minimize = true;
};

/// Unanchored subset construction: the start closure is merged into every
/// subset, so a match may begin at any input offset. States are numbered in
/// breadth-first order from the start, visiting bytes in ascending order.
Dfa determinize(const Nfa& nfa, std::size_t max_states = kDefaultMaxDfaStates);

/// Partition-refinement minimization. Accept states are first split by their
/// pattern-id sets so attribution survives. Output uses the same
/// breadth-first numbering as determinize().
Dfa minimize(const Dfa& dfa);

/// Parses, builds and determinizes a pattern set into one search DFA.
/// Pattern i carries PatternId i. Per-pattern failures (syntax,
/// unsupported features, empty-string matches) are collected into a single
/// CompileError; state blow-up raises CapacityError.
Dfa compile_pattern_set(std::span<const std::string> patterns, const CompileConfig& config = {});

}  // namespace hdfa
