#include "hdfa/dfa.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <string>
#include <unordered_map>

#include "hdfa/error.hpp"

namespace hdfa {

Dfa::Dfa(std::vector<StateId> transitions, StateId start, std::vector<std::vector<PatternId>> accepts)
    : transitions_(std::move(transitions)), start_(start), accepts_(std::move(accepts)) {
  const std::size_t n = accepts_.size();
  if (n == 0) throw Error("DFA has no states");
  if (transitions_.size() != n * kAlphabetSize) throw Error("DFA transition table is not n x 256");
  if (start_ >= n) throw Error("DFA start state out of range");
  for (StateId t : transitions_)
    if (t >= n) throw Error("DFA transition target out of range");
  for (auto& a : accepts_) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  std::vector<char> seen(n, 0);
  std::vector<StateId> stack{start_};
  seen[start_] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId t : row(s)) {
      if (!seen[t]) {
        seen[t] = 1;
        ++reached;
        stack.push_back(t);
      }
    }
  }
  if (reached != n) throw Error("DFA has states unreachable from the start state");
}

std::size_t Dfa::pattern_count() const noexcept {
  std::size_t count = 0;
  for (const auto& a : accepts_)
    if (!a.empty()) count = std::max<std::size_t>(count, a.back() + 1);
  return count;
}

CompileError::CompileError(std::vector<PatternDiagnostic> diagnostics)
    : Error([&] {
        if (diagnostics.empty()) return std::string("no patterns");
        std::string msg = "failed to compile " + std::to_string(diagnostics.size()) + " pattern(s)";
        for (const auto& d : diagnostics)
          msg += "\n  pattern " + std::to_string(d.pattern_index) + ": " + d.message;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

const char* to_string(DbErrorKind kind) noexcept {
  switch (kind) {
    case DbErrorKind::BadMagic: return "bad magic";
    case DbErrorKind::UnsupportedVersion: return "unsupported version";
    case DbErrorKind::Truncated: return "truncated payload";
    case DbErrorKind::InvariantViolation: return "invariant violation";
  }
  return "database error";
}

namespace {

struct VectorHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint32_t x : v) {
      h ^= x;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

// Partition of 0..255 such that every label set is a union of classes.
std::array<std::uint16_t, kAlphabetSize> byte_classes(const Nfa& nfa, std::uint16_t& class_count) {
  std::array<std::uint16_t, kAlphabetSize> cls{};
  class_count = 1;
  std::vector<ByteSet> distinct;
  for (const auto& s : nfa.states)
    for (const auto& e : s.edges) distinct.push_back(e.bytes);
  std::sort(distinct.begin(), distinct.end(),
            [](const ByteSet& a, const ByteSet& b) { return a.to_string() < b.to_string(); });
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (const ByteSet& set : distinct) {
    std::map<std::pair<std::uint16_t, bool>, std::uint16_t> remap;
    for (std::size_t b = 0; b < kAlphabetSize; ++b) {
      auto key = std::make_pair(cls[b], set.test(b));
      auto [it, inserted] = remap.try_emplace(key, static_cast<std::uint16_t>(remap.size()));
      cls[b] = it->second;
    }
    class_count = static_cast<std::uint16_t>(remap.size());
  }
  return cls;
}

// Renumbers the automaton given by `succ` breadth-first from `start`.
template <typename Succ>
Dfa bfs_renumber(std::size_t n, StateId start, Succ succ, const std::vector<std::vector<PatternId>>& accepts) {
  constexpr StateId kUnset = ~StateId{0};
  std::vector<StateId> order;
  std::vector<StateId> new_id(n, kUnset);
  order.reserve(n);
  new_id[start] = 0;
  order.push_back(start);
  for (std::size_t i = 0; i < order.size(); ++i) {
    StateId s = order[i];
    for (std::size_t b = 0; b < kAlphabetSize; ++b) {
      StateId t = succ(s, static_cast<std::uint8_t>(b));
      if (new_id[t] == kUnset) {
        new_id[t] = static_cast<StateId>(order.size());
        order.push_back(t);
      }
    }
  }
  std::vector<StateId> table(order.size() * kAlphabetSize);
  std::vector<std::vector<PatternId>> acc(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t b = 0; b < kAlphabetSize; ++b)
      table[i * kAlphabetSize + b] = new_id[succ(order[i], static_cast<std::uint8_t>(b))];
    acc[i] = accepts[order[i]];
  }
  return Dfa(std::move(table), 0, std::move(acc));
}

}  // namespace

Dfa determinize(const Nfa& nfa, std::size_t max_states) {
  std::uint16_t class_count = 0;
  const auto cls = byte_classes(nfa, class_count);
  std::array<std::uint8_t, kAlphabetSize> rep{};
  std::vector<char> rep_set(class_count, 0);
  for (std::size_t b = 0; b < kAlphabetSize; ++b) {
    if (!rep_set[cls[b]]) {
      rep_set[cls[b]] = 1;
      rep[cls[b]] = static_cast<std::uint8_t>(b);
    }
  }

  const NfaStateId start_seed[] = {nfa.start};
  const std::vector<NfaStateId> start_closure = epsilon_closure(nfa, start_seed);

  std::unordered_map<std::vector<NfaStateId>, StateId, VectorHash> ids;
  std::vector<std::vector<NfaStateId>> subsets;
  std::vector<StateId> table;
  std::vector<std::vector<PatternId>> accepts;

  auto intern = [&](std::vector<NfaStateId> subset) -> StateId {
    auto it = ids.find(subset);
    if (it != ids.end()) return it->second;
    if (subsets.size() >= max_states) {
      throw CapacityError("DFA exceeds " + std::to_string(max_states) + " states");
    }
    auto id = static_cast<StateId>(subsets.size());
    std::vector<PatternId> acc;
    for (NfaStateId s : subset)
      if (nfa.states[s].accept) acc.push_back(*nfa.states[s].accept);
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    accepts.push_back(std::move(acc));
    ids.emplace(subset, id);
    subsets.push_back(std::move(subset));
    return id;
  };

  intern(start_closure);
  std::vector<StateId> per_class(class_count);
  std::vector<NfaStateId> seeds;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (std::uint16_t c = 0; c < class_count; ++c) {
      seeds.assign(start_closure.begin(), start_closure.end());
      for (NfaStateId s : subsets[i])
        for (const auto& e : nfa.states[s].edges)
          if (e.bytes.test(rep[c])) seeds.push_back(e.target);
      per_class[c] = intern(epsilon_closure(nfa, seeds));
    }
    table.resize(subsets.size() * kAlphabetSize);
    for (std::size_t b = 0; b < kAlphabetSize; ++b) table[i * kAlphabetSize + b] = per_class[cls[b]];
  }
  table.resize(subsets.size() * kAlphabetSize);

  const std::size_t n = subsets.size();
  return bfs_renumber(
      n, 0, [&](StateId s, std::uint8_t b) { return table[static_cast<std::size_t>(s) * kAlphabetSize + b]; },
      accepts);
}

Dfa minimize(const Dfa& dfa) {
  const std::size_t n = dfa.state_count();

  // Bytes with identical columns behave identically; refine on one per class.
  std::vector<std::uint8_t> reps;
  {
    std::unordered_map<std::vector<StateId>, int, VectorHash> columns;
    std::vector<StateId> col(n);
    for (std::size_t b = 0; b < kAlphabetSize; ++b) {
      for (std::size_t s = 0; s < n; ++s) col[s] = dfa.next(static_cast<StateId>(s), static_cast<std::uint8_t>(b));
      if (columns.emplace(col, 0).second) reps.push_back(static_cast<std::uint8_t>(b));
    }
  }

  std::vector<std::uint32_t> block(n);
  std::size_t block_count = 0;
  {
    std::map<std::vector<PatternId>, std::uint32_t> initial;
    for (std::size_t s = 0; s < n; ++s) {
      auto acc = dfa.accepts(static_cast<StateId>(s));
      std::vector<PatternId> key(acc.begin(), acc.end());
      auto [it, inserted] = initial.try_emplace(std::move(key), static_cast<std::uint32_t>(initial.size()));
      block[s] = it->second;
    }
    block_count = initial.size();
  }

  std::vector<std::uint32_t> signature(reps.size() + 1);
  for (;;) {
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, VectorHash> refined;
    std::vector<std::uint32_t> next_block(n);
    for (std::size_t s = 0; s < n; ++s) {
      signature[0] = block[s];
      for (std::size_t i = 0; i < reps.size(); ++i) signature[i + 1] = block[dfa.next(static_cast<StateId>(s), reps[i])];
      auto [it, inserted] = refined.try_emplace(signature, static_cast<std::uint32_t>(refined.size()));
      next_block[s] = it->second;
    }
    block.swap(next_block);
    if (refined.size() == block_count) break;
    block_count = refined.size();
  }

  std::vector<StateId> representative(block_count);
  std::vector<std::vector<PatternId>> accepts(block_count);
  for (std::size_t s = n; s-- > 0;) {
    representative[block[s]] = static_cast<StateId>(s);
    auto acc = dfa.accepts(static_cast<StateId>(s));
    accepts[block[s]].assign(acc.begin(), acc.end());
  }
  return bfs_renumber(
      block_count, block[dfa.start()],
      [&](StateId b, std::uint8_t byte) { return block[dfa.next(representative[b], byte)]; }, accepts);
}

Dfa compile_pattern_set(std::span<const std::string> patterns, const CompileConfig& config) {
  if (patterns.empty()) throw CompileError({});
  std::vector<PatternDiagnostic> diagnostics;
  std::vector<Nfa> parts;
  parts.reserve(patterns.size());
  std::size_t nfa_states = 0;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    try {
      SyntaxTree tree = parse_pattern(patterns[i]);
      if (matches_empty(tree)) {
        throw UnsupportedFeature("pattern matches the empty string", 0);
      }
      std::size_t budget = config.max_nfa_states > nfa_states ? config.max_nfa_states - nfa_states : 0;
      parts.push_back(build_nfa(tree, static_cast<PatternId>(i), budget));
      nfa_states += parts.back().state_count();
    } catch (const SyntaxError& e) {
      diagnostics.push_back({i, e.offset(), e.what()});
    } catch (const UnsupportedFeature& e) {
      diagnostics.push_back({i, e.offset(), e.what()});
    }
  }
  if (!diagnostics.empty()) throw CompileError(std::move(diagnostics));
  Nfa all = union_nfa(parts, config.max_nfa_states + 1);
  Dfa dfa = determinize(all, config.max_dfa_states);
  return config.minimize ? minimize(dfa) : dfa;
}

}  // namespace hdfa
