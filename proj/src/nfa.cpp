#include "hdfa/nfa.hpp"

#include <algorithm>
#include <string>

#include "hdfa/error.hpp"

namespace hdfa {

namespace {

struct Fragment {
  NfaStateId start;
  NfaStateId end;
};

class Builder {
 public:
  explicit Builder(std::size_t max_states) : max_states_(max_states) {}

  Nfa finish(const SyntaxNode& tree, PatternId id) {
    Fragment f = build(tree);
    nfa_.start = f.start;
    nfa_.states[f.end].accept = id;
    return std::move(nfa_);
  }

 private:
  NfaStateId new_state() {
    if (nfa_.states.size() >= max_states_) {
      throw CapacityError("NFA exceeds " + std::to_string(max_states_) + " states");
    }
    nfa_.states.emplace_back();
    return static_cast<NfaStateId>(nfa_.states.size() - 1);
  }

  void epsilon(NfaStateId from, NfaStateId to) { nfa_.states[from].epsilon.push_back(to); }

  Fragment bytes(const ByteSet& set) {
    NfaStateId s = new_state();
    NfaStateId e = new_state();
    nfa_.states[s].edges.push_back({set, e});
    return {s, e};
  }

  Fragment empty() {
    NfaStateId s = new_state();
    return {s, s};
  }

  Fragment sequence(const std::vector<Fragment>& parts) {
    for (std::size_t i = 1; i < parts.size(); ++i) epsilon(parts[i - 1].end, parts[i].start);
    return {parts.front().start, parts.back().end};
  }

  Fragment star(Fragment body) {
    NfaStateId s = new_state();
    NfaStateId e = new_state();
    epsilon(s, body.start);
    epsilon(s, e);
    epsilon(body.end, body.start);
    epsilon(body.end, e);
    return {s, e};
  }

  Fragment optional(Fragment body) {
    NfaStateId s = new_state();
    NfaStateId e = new_state();
    epsilon(s, body.start);
    epsilon(s, e);
    epsilon(body.end, e);
    return {s, e};
  }

  Fragment build(const SyntaxNode& n) {
    using K = SyntaxNode::Kind;
    switch (n.kind) {
      case K::Empty:
        return empty();
      case K::Literal: {
        ByteSet set;
        set.set(n.byte);
        return bytes(set);
      }
      case K::Class:
        return bytes(n.bytes);
      case K::Group:
        return build(n.children.front());
      case K::Concat: {
        std::vector<Fragment> parts;
        parts.reserve(n.children.size());
        for (const auto& c : n.children) parts.push_back(build(c));
        return sequence(parts);
      }
      case K::Alternation: {
        NfaStateId s = new_state();
        NfaStateId e = new_state();
        for (const auto& c : n.children) {
          Fragment f = build(c);
          epsilon(s, f.start);
          epsilon(f.end, e);
        }
        return {s, e};
      }
      case K::Repeat:
        return repeat(n.children.front(), n.min, n.max);
    }
    return empty();
  }

  // x{m,n} = x^m (x(x(...)?)?)? with n-m nested optionals; x{m,} = x^m x*.
  Fragment repeat(const SyntaxNode& body, std::uint32_t min, std::uint32_t max) {
    std::vector<Fragment> parts;
    for (std::uint32_t i = 0; i < min; ++i) parts.push_back(build(body));
    if (max == kUnbounded) {
      parts.push_back(star(build(body)));
    } else if (max > min) {
      Fragment tail = optional(build(body));
      for (std::uint32_t i = min + 1; i < max; ++i) {
        Fragment inner = build(body);
        epsilon(inner.end, tail.start);
        tail = optional({inner.start, tail.end});
      }
      parts.push_back(tail);
    }
    if (parts.empty()) return empty();
    return sequence(parts);
  }

  Nfa nfa_;
  std::size_t max_states_;
};

}  // namespace

Nfa build_nfa(const SyntaxTree& tree, PatternId id, std::size_t max_states) {
  return Builder(max_states).finish(tree, id);
}

Nfa union_nfa(std::span<const Nfa> parts, std::size_t max_states) {
  std::size_t total = 1;
  for (const auto& p : parts) total += p.state_count();
  if (total > max_states) {
    throw CapacityError("NFA exceeds " + std::to_string(max_states) + " states");
  }
  Nfa out;
  out.states.reserve(total);
  out.states.emplace_back();
  out.start = 0;
  for (const auto& p : parts) {
    auto base = static_cast<NfaStateId>(out.states.size());
    for (const auto& s : p.states) {
      Nfa::State copy = s;
      for (auto& t : copy.epsilon) t += base;
      for (auto& e : copy.edges) e.target += base;
      out.states.push_back(std::move(copy));
    }
    out.states[0].epsilon.push_back(p.start + base);
  }
  return out;
}

std::vector<NfaStateId> epsilon_closure(const Nfa& nfa, std::span<const NfaStateId> seeds) {
  std::vector<char> seen(nfa.state_count(), 0);
  std::vector<NfaStateId> stack(seeds.begin(), seeds.end());
  std::vector<NfaStateId> out;
  while (!stack.empty()) {
    NfaStateId s = stack.back();
    stack.pop_back();
    if (seen[s]) continue;
    seen[s] = 1;
    out.push_back(s);
    for (NfaStateId t : nfa.states[s].epsilon)
      if (!seen[t]) stack.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hdfa
