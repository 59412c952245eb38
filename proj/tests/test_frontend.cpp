#include <doctest.h>

#include <random>
#include <set>

#include "hdfa/dfa.hpp"
#include "hdfa/error.hpp"
#include "hdfa/nfa.hpp"
#include "hdfa/regex.hpp"
#include "hdfa/rules.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace hdfa;

namespace {

// Plain set simulation of an NFA against a whole string.
bool nfa_accepts(const Nfa& nfa, std::string_view text) {
  auto close = [&](std::set<NfaStateId> s) {
    std::vector<NfaStateId> stack(s.begin(), s.end());
    while (!stack.empty()) {
      NfaStateId u = stack.back();
      stack.pop_back();
      for (NfaStateId v : nfa.states[u].epsilon)
        if (s.insert(v).second) stack.push_back(v);
    }
    return s;
  };
  std::set<NfaStateId> cur = close({nfa.start});
  for (char ch : text) {
    std::set<NfaStateId> next;
    for (NfaStateId u : cur)
      for (const auto& e : nfa.states[u].edges)
        if (e.bytes.test(static_cast<unsigned char>(ch))) next.insert(e.target);
    cur = close(next);
  }
  for (NfaStateId u : cur)
    if (nfa.states[u].accept) return true;
  return false;
}

Dfa compile_one(const std::string& p, CompileConfig cfg = {}) {
  std::vector<std::string> v{p};
  return compile_pattern_set(v, cfg);
}

std::vector<MatchEvent> scan(const std::vector<std::string>& patterns, std::string_view text) {
  return oracle::dfa_matches(compile_pattern_set(patterns), text);
}

}  // namespace

TEST_CASE("parse: structural rendering") {
  CHECK(to_string(parse_pattern("mode+l")) == "concat(m,o,d,rep(e,1..inf),l)");
  SyntaxNode a = parse_pattern("a");
  CHECK(a.kind == SyntaxNode::Kind::Literal);
  CHECK(a.byte == 0x61);

  SyntaxNode r = parse_pattern("[^a]{2,3}");
  REQUIRE(r.kind == SyntaxNode::Kind::Repeat);
  CHECK(r.min == 2);
  CHECK(r.max == 3);
  REQUIRE(r.children.at(0).kind == SyntaxNode::Kind::Class);
  CHECK(r.children[0].bytes.count() == 255);
  CHECK_FALSE(r.children[0].bytes.test('a'));
  CHECK(oracle::full_match(r, "bb"));
  CHECK(oracle::full_match(r, "bbb"));
  CHECK_FALSE(oracle::full_match(r, "ab"));
  CHECK_FALSE(oracle::full_match(r, "b"));
  CHECK_FALSE(oracle::full_match(r, "bbbb"));
}

TEST_CASE("parse: dialect coverage") {
  CHECK(parse_pattern(".").bytes.count() == 256);
  CHECK(parse_pattern("\\d").bytes.count() == 10);
  CHECK(parse_pattern("\\D").bytes.count() == 246);
  CHECK(parse_pattern("\\w").bytes.count() == 63);
  CHECK(parse_pattern("\\s").bytes.count() == 6);
  CHECK(parse_pattern("\\x41").byte == 'A');
  CHECK(parse_pattern("\\.").byte == '.');
  CHECK(parse_pattern("\\\\").byte == '\\');
  CHECK(parse_pattern("\\n").byte == '\n');
  CHECK(parse_pattern("\\t").byte == '\t');
  CHECK(parse_pattern("\\r").byte == '\r');
  CHECK(parse_pattern("[a-c\\d]").bytes.count() == 13);
  CHECK(parse_pattern("[]a]").bytes.count() == 2);
  CHECK(parse_pattern("[^\\n]").bytes.count() == 255);
  CHECK(to_string(parse_pattern("a{3}")) == "rep(a,3..3)");
  CHECK(to_string(parse_pattern("a{2,}")) == "rep(a,2..inf)");
  CHECK(to_string(parse_pattern("a*")) == "rep(a,0..inf)");
  CHECK(to_string(parse_pattern("a?")) == "rep(a,0..1)");
  SyntaxNode alt = parse_pattern("ab|c");
  CHECK(alt.kind == SyntaxNode::Kind::Alternation);
  CHECK(alt.children.size() == 2);
}

TEST_CASE("parse: errors carry offsets") {
  for (const char* p : {"^abc", "abc$", "(?=a)", "(?:a)", "(a)\\1", "a\\b"}) {
    CAPTURE(p);
    CHECK_THROWS_AS(parse_pattern(p), UnsupportedFeature);
  }
  for (const char* p : {"(a", "a)", "[ab", "*a", "a{", "a{3,2}", "\\q", "\\x4", "a|*", "[z-a]"}) {
    CAPTURE(p);
    CHECK_THROWS_AS(parse_pattern(p), SyntaxError);
  }
  try {
    parse_pattern("ab(c");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() <= 4);
  }
  try {
    parse_pattern("ab$");
    FAIL("expected an unsupported feature");
  } catch (const UnsupportedFeature& e) {
    CHECK(e.offset() == 2);
  }
}

TEST_CASE("nfa: construction") {
  Nfa lit = build_nfa(parse_pattern("a"), 0);
  CHECK(lit.state_count() == 2);
  std::size_t edges = 0;
  for (const auto& s : lit.states) {
    for (const auto& e : s.edges) {
      ++edges;
      CHECK(e.bytes.count() == 1);
      CHECK(e.bytes.test('a'));
    }
  }
  CHECK(edges == 1);

  Nfa plus = build_nfa(parse_pattern("e+"), 0);
  CHECK(nfa_accepts(plus, "e"));
  CHECK(nfa_accepts(plus, "ee"));
  CHECK_FALSE(nfa_accepts(plus, ""));

  Nfa golden = build_nfa(parse_pattern("mode+l"), 7);
  CHECK(nfa_accepts(golden, "model"));
  CHECK(nfa_accepts(golden, "modeel"));
  CHECK_FALSE(nfa_accepts(golden, "modl"));

  std::size_t accepts = 0;
  for (const auto& s : golden.states) {
    for (auto t : s.epsilon) CHECK(t < golden.state_count());
    for (const auto& e : s.edges) CHECK(e.target < golden.state_count());
    if (s.accept) {
      ++accepts;
      CHECK(*s.accept == 7);
    }
  }
  CHECK(accepts == 1);

  CHECK_THROWS_AS(build_nfa(parse_pattern("a{1000}"), 0, 100), CapacityError);
}

TEST_CASE("nfa: language agrees with the tree matcher") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    std::string p = gen::random_pattern(rng, "ab");
    SyntaxNode tree = parse_pattern(p);
    Nfa nfa = build_nfa(tree, 0);
    gen::for_each_string("ab", 6, [&](const std::string& s) {
      CAPTURE(p);
      CAPTURE(s);
      REQUIRE(nfa_accepts(nfa, s) == oracle::full_match(tree, s));
    });
  }
}

TEST_CASE("compile: golden automaton for mode+l") {
  Dfa dfa = compile_one("mode+l");
  REQUIRE(dfa.state_count() == 6);
  CHECK(dfa.start() == 0);
  for (unsigned b = 0; b < 256; ++b) CHECK(dfa.next(0, static_cast<std::uint8_t>(b)) == (b == 'm' ? 1u : 0u));
  CHECK(dfa.next(1, 'm') == 1);
  CHECK(dfa.next(1, 'o') == 2);
  CHECK(dfa.next(2, 'd') == 3);
  CHECK(dfa.next(3, 'e') == 4);
  CHECK(dfa.next(4, 'e') == 4);
  CHECK(dfa.next(4, 'l') == 5);
  CHECK(dfa.next(5, 'm') == 1);
  for (StateId s = 0; s < 5; ++s) CHECK_FALSE(dfa.is_accept(s));
  REQUIRE(dfa.accepts(5).size() == 1);
  CHECK(dfa.accepts(5)[0] == 0);
  // Rows 2..5 fall back to 0 except on 'm'.
  for (StateId s = 2; s < 6; ++s) {
    for (unsigned b = 0; b < 256; ++b) {
      StateId t = dfa.next(s, static_cast<std::uint8_t>(b));
      if (b == 'm') CHECK(t == 1);
      else if ((s == 2 && b == 'd') || (s == 3 && b == 'e') || (s == 4 && (b == 'e' || b == 'l'))) continue;
      else CHECK(t == 0);
    }
  }
}

TEST_CASE("compile: unanchored events") {
  auto ev = scan({"a"}, "aaa");
  REQUIRE(ev.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ev[i] == MatchEvent{0, i + 1});

  auto two = scan({"ab", "bc"}, "abc");
  REQUIRE(two.size() == 2);
  CHECK(two[0] == MatchEvent{0, 2});
  CHECK(two[1] == MatchEvent{1, 3});

  CHECK(scan({"mode+l"}, "hmodel") == std::vector<MatchEvent>{{0, 6}});
  CHECK(oracle::naive_matches({"ab", "bc"}, "abc") == two);
}

TEST_CASE("compile: errors are aggregated per pattern") {
  std::vector<std::string> none;
  try {
    compile_pattern_set(none);
    FAIL("expected CompileError");
  } catch (const CompileError& e) {
    CHECK(e.diagnostics().empty());
    CHECK(std::string(e.what()).find("no patterns") != std::string::npos);
  }
  std::vector<std::string> bad{"ok", "(x", "a*", "y$"};
  try {
    compile_pattern_set(bad);
    FAIL("expected CompileError");
  } catch (const CompileError& e) {
    REQUIRE(e.diagnostics().size() == 3);
    CHECK(e.diagnostics()[0].pattern_index == 1);
    CHECK(e.diagnostics()[1].pattern_index == 2);
    CHECK(e.diagnostics()[2].pattern_index == 3);
    CHECK(e.diagnostics()[2].offset == 1);
  }
}

TEST_CASE("compile: state limits") {
  CompileConfig small;
  small.max_dfa_states = 50;
  CHECK_THROWS_AS(compile_one("(a|b)*a(a|b){10}", small), CapacityError);
  CompileConfig tiny_nfa;
  tiny_nfa.max_nfa_states = 10;
  CHECK_THROWS_AS(compile_one("abcdefghijkl", tiny_nfa), CapacityError);
}

TEST_CASE("compile: totality and determinism") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto set = gen::random_pattern_set(rng, "abc");
    Dfa d1 = compile_pattern_set(set);
    Dfa d2 = compile_pattern_set(set);
    CHECK(d1 == d2);
    REQUIRE(d1.transitions().size() == d1.state_count() * 256);
    for (StateId t : d1.transitions()) REQUIRE(t < d1.state_count());
    auto reach = oracle::reachability(d1);
    for (StateId s = 0; s < d1.state_count(); ++s) REQUIRE(reach[d1.start()][s]);
  }
}

TEST_CASE("compile: language equivalence with the naive matcher") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 60; ++round) {
    auto set = gen::random_pattern_set(rng, "ab");
    Dfa dfa = compile_pattern_set(set);
    CAPTURE(set.size());
    CAPTURE(set[0]);
    gen::for_each_string("ab", 9, [&](const std::string& s) {
      CAPTURE(s);
      REQUIRE(oracle::dfa_matches(dfa, s) == oracle::naive_matches(set, s));
    });
    for (int i = 0; i < 20; ++i) {
      std::string s = gen::random_text(rng, "ab", 10 + rng() % 55);
      CAPTURE(s);
      REQUIRE(oracle::dfa_matches(dfa, s) == oracle::naive_matches(set, s));
    }
  }
}

TEST_CASE("compile: minimization soundness") {
  std::mt19937_64 rng(99);
  CompileConfig raw;
  raw.minimize = false;
  for (int round = 0; round < 60; ++round) {
    auto set = gen::random_pattern_set(rng, "abc", 4);
    Dfa full = compile_pattern_set(set, raw);
    Dfa small = compile_pattern_set(set);
    CHECK(small.state_count() <= full.state_count());
    CHECK(minimize(small) == small);
    for (int i = 0; i < 30; ++i) {
      std::string s = gen::random_text(rng, "abcd", rng() % 80);
      REQUIRE(oracle::dfa_matches(full, s) == oracle::dfa_matches(small, s));
    }
  }
}

TEST_CASE("compile: attribution survives minimization") {
  std::vector<std::string> set{"ab", "ab", "b"};
  Dfa dfa = compile_pattern_set(set);
  auto ev = oracle::dfa_matches(dfa, "ab");
  CHECK(ev == std::vector<MatchEvent>{{0, 2}, {1, 2}, {2, 2}});
}

TEST_CASE("dfa: constructor validation") {
  std::vector<StateId> t(2 * 256, 0);
  CHECK_THROWS_AS(Dfa(t, 0, {{}, {}}), Error);  // state 1 unreachable
  t[0] = 1;
  CHECK_NOTHROW(Dfa(t, 0, {{}, {0}}));
  t[1] = 5;
  CHECK_THROWS_AS(Dfa(t, 0, {{}, {0}}), Error);  // id out of range
  CHECK_THROWS_AS(Dfa(std::vector<StateId>(3, 0), 0, {{}}), Error);  // not total
}

TEST_CASE("rules: file format") {
  RuleSet r = parse_rules("# comment\nmode+l\n\n   \nab|cd\r\n#x\n[0-9]+\n");
  REQUIRE(r.patterns.size() == 3);
  CHECK(r.patterns[0] == "mode+l");
  CHECK(r.patterns[1] == "ab|cd");
  CHECK(r.patterns[2] == "[0-9]+");
  CHECK(r.line_numbers == std::vector<std::size_t>{2, 5, 7});
  CHECK(parse_rules("").patterns.empty());
  CHECK_THROWS_AS(load_rules("/nonexistent/rules.txt"), IoError);
}
