#include <doctest.h>

#include <random>
#include <set>

#include "hdfa/dfa.hpp"
#include "hdfa/error.hpp"
#include "hdfa/region.hpp"
#include "support/oracles.hpp"

using namespace hdfa;

namespace {

// Rows start out as "every byte goes to fallback[s]"; edits then patch
// single (state, byte) cells.
struct Edit {
  StateId from;
  unsigned byte;
  StateId to;
};

Dfa make_dfa(const std::vector<StateId>& fallback, const std::vector<Edit>& edits,
             const std::set<StateId>& accepting = {}) {
  const std::size_t n = fallback.size();
  std::vector<StateId> t(n * 256);
  for (StateId s = 0; s < n; ++s)
    for (unsigned b = 0; b < 256; ++b) t[s * 256 + b] = fallback[s];
  for (const auto& e : edits) t[e.from * 256 + e.byte] = e.to;
  std::vector<std::vector<PatternId>> acc(n);
  for (auto s : accepting) acc[s] = {0};
  return Dfa(std::move(t), 0, std::move(acc));
}

Dfa golden() {
  std::vector<std::string> p{"mode+l"};
  return compile_pattern_set(p);
}

std::set<std::set<StateId>> as_sets(const std::vector<SccInfo>& sccs) {
  std::set<std::set<StateId>> out;
  for (const auto& s : sccs) out.insert(std::set<StateId>(s.members.begin(), s.members.end()));
  return out;
}

}  // namespace

TEST_CASE("scc: examples") {
  Dfa g = golden();
  auto sccs = compute_sccs(g);
  REQUIRE(sccs.size() == 1);
  CHECK(sccs[0].members == std::vector<StateId>{0, 1, 2, 3, 4, 5});
  CHECK(scc_distance(g, sccs[0]) == 0);

  // 0 loops on itself, 'a' leads to 1, then 2 which is absorbing.
  Dfa chain = make_dfa({0, 2, 2}, {{0, 'a', 1}});
  CHECK(as_sets(compute_sccs(chain)) == std::set<std::set<StateId>>{{0}, {1}, {2}});

  // Cycles {0,1} and {2,3}, bridged 1 -> 2 on 'z'.
  Dfa bridged = make_dfa({1, 0, 3, 2}, {{1, 'z', 2}});
  auto two = compute_sccs(bridged);
  std::size_t multi = 0;
  for (const auto& s : two) multi += s.members.size() > 1;
  CHECK(multi == 2);
  CHECK(as_sets(two) == std::set<std::set<StateId>>{{0, 1}, {2, 3}});
}

TEST_CASE("scc: partition matches pairwise reachability") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Dfa d = oracle::random_dfa(rng, 2 + rng() % 14, 0.2, 1 + rng() % 5);
    auto labels = oracle::scc_labels(d);
    auto sccs = compute_sccs(d);
    std::vector<int> seen(d.state_count(), 0);
    for (const auto& s : sccs) {
      REQUIRE(std::is_sorted(s.members.begin(), s.members.end()));
      for (auto m : s.members) {
        ++seen[m];
        REQUIRE(labels[m] == labels[s.members.front()]);
      }
    }
    for (StateId s = 0; s < d.state_count(); ++s) REQUIRE(seen[s] == 1);
    // Members of distinct SCCs never share a label.
    std::set<StateId> heads;
    for (const auto& s : sccs) REQUIRE(heads.insert(labels[s.members.front()]).second);
  }
}

TEST_CASE("stickiness: examples and brute force") {
  // State 1 is entered only on 'a' (from 0) and 'c' (from 2).
  Dfa d = make_dfa({0, 0, 0}, {{0, 'a', 1}, {2, 'c', 1}, {1, 'x', 2}});
  CHECK(state_stickiness(d, 1) == 2);

  // Nothing ever returns to 0.
  Dfa src = make_dfa({1, 1}, {});
  CHECK(state_stickiness(src, 0) == 0);
  CHECK(state_stickiness(src, 1) == 256);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Dfa r = oracle::random_dfa(rng, 2 + rng() % 10);
    auto all = all_stickiness(r);
    for (StateId s = 0; s < r.state_count(); ++s) {
      REQUIRE(all[s] == oracle::stickiness(r, s));
      REQUIRE(all[s] <= 256);
    }
  }
}

TEST_CASE("distance and start selection") {
  Dfa chain = make_dfa({1, 2, 2}, {});
  auto sccs = compute_sccs(chain);
  for (const auto& s : sccs) {
    if (s.members == std::vector<StateId>{2}) CHECK(scc_distance(chain, s) == 2);
    if (s.members == std::vector<StateId>{0}) CHECK(scc_distance(chain, s) == 0);
  }

  Dfa g = golden();
  DetectorConfig cfg;
  cfg.sigma = 1000;
  CHECK_FALSE(select_start_scc(g, cfg).has_value());

  // Golden stickiness sum over non-accept members, from the brute force.
  std::uint64_t sum = 0;
  for (StateId s = 0; s < 5; ++s) sum += oracle::stickiness(g, s);
  cfg.sigma = 3;
  auto picked = select_start_scc(g, cfg);
  CHECK(picked.has_value() == (sum > 3));
  REQUIRE(picked);
  CHECK(picked->stickiness_sum == sum);
  cfg.sigma = static_cast<std::uint32_t>(sum);
  CHECK_FALSE(select_start_scc(g, cfg).has_value());  // strict comparison

  // 0 -> {1,2} cycle at distance 1; 0 -'z'-> 3 -> 4 -> {5,6} cycle at distance 3.
  Dfa two = make_dfa({1, 2, 1, 4, 5, 6, 5}, {{0, 'z', 3}});
  cfg.sigma = 1;
  auto q = qualifying_sccs(two, cfg);
  REQUIRE(q.size() >= 2);
  CHECK(q[0].members == std::vector<StateId>{1, 2});
  CHECK(q[0].distance == 1);
  auto first = select_start_scc(two, cfg);
  REQUIRE(first);
  CHECK(first->members == std::vector<StateId>{1, 2});
  for (const auto& s : q)
    if (s.members == std::vector<StateId>{5, 6}) CHECK(s.distance == 3);
}

TEST_CASE("expand_region") {
  Dfa g = golden();
  DetectorConfig cfg;
  auto scc = compute_sccs(g).at(0);
  RegionPlan plan = expand_region(g, scc, cfg);
  CHECK(plan.members == std::vector<StateId>{0, 1, 2, 3, 4});
  CHECK(plan.start == 0);

  // A closed 4-cycle: the plan is the whole component.
  Dfa cycle = make_dfa({1, 2, 3, 0}, {});
  RegionPlan whole = expand_region(cycle, compute_sccs(cycle).at(0), cfg);
  CHECK(whole.members == std::vector<StateId>{0, 1, 2, 3});

  // Star: 0 fans out to 100 states, each returning to 0.
  std::vector<StateId> fallback(101, 0);
  std::vector<Edit> edits;
  for (unsigned b = 0; b < 100; ++b) edits.push_back({0, b, b + 1});
  Dfa star = make_dfa(fallback, edits);
  RegionPlan capped = expand_region(star, compute_sccs(star).at(0), cfg);
  CHECK(capped.members.size() == 63);
  CHECK(capped.members.front() == 0);
  for (std::size_t i = 1; i < capped.members.size(); ++i) CHECK(capped.members[i] == i);

  cfg.capacity = 10;
  CHECK(expand_region(star, compute_sccs(star).at(0), cfg).members.size() == 10);
}

TEST_CASE("expand_region: SCC members first within a level") {
  // 0 -> {1 (off-SCC, absorbing), 2}; 2 -> 0 so {0,2} is the SCC.
  Dfa d = make_dfa({2, 1, 0}, {{0, 'a', 1}});
  SccInfo scc;
  for (const auto& s : compute_sccs(d))
    if (s.members.size() == 2) scc = s;
  REQUIRE(scc.members == std::vector<StateId>{0, 2});
  RegionPlan plan = expand_region(d, scc, DetectorConfig{});
  CHECK(plan.members == std::vector<StateId>{0, 2, 1});
}

TEST_CASE("transit probabilities") {
  Dfa sole = make_dfa({0}, {});
  auto b = edge_bundles(sole, 0);
  REQUIRE(b.size() == 1);
  CHECK(transit_probability(b[0]) == 1.0);

  Dfa g = golden();
  for (StateId s = 0; s < g.state_count(); ++s) {
    double total = 0;
    std::size_t widths = 0;
    ByteSet seen;
    for (const auto& e : edge_bundles(g, s)) {
      CHECK((seen & e.bytes).none());
      seen |= e.bytes;
      total += transit_probability(e);
      widths += e.width();
      if (e.width() == 1) CHECK(transit_probability(e) == 0.00390625);
    }
    CHECK(seen.all());
    CHECK(widths == 256);
    CHECK(total == 1.0);
  }
}

TEST_CASE("leakiness: exact values") {
  Dfa cycle = make_dfa({1, 2, 3, 0}, {});
  std::vector<StateId> all{0, 1, 2, 3};
  for (std::uint32_t d = 1; d <= 12; ++d) CHECK(region_leakiness(cycle, all, 0, d) == 0.0);

  // State 0 keeps 200 bytes and leaves on 56.
  std::vector<Edit> edits;
  for (unsigned b = 200; b < 256; ++b) edits.push_back({0, b, 1});
  Dfa leaky = make_dfa({0, 0}, edits);
  std::vector<StateId> one{0};
  CHECK(region_leakiness(leaky, one, 0, 1) == 0.21875);
  CHECK(region_leakiness(leaky, one, 0, 2) == doctest::Approx(0.3896484375).epsilon(1e-15));
  CHECK(region_leakiness(leaky, one, 1, 3) == 1.0);  // start outside
}

TEST_CASE("leakiness: bounds, monotonicity, sampling agreement") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 40; ++i) {
    Dfa d = oracle::random_dfa(rng, 3 + rng() % 8, 0.0, 2 + rng() % 5);
    std::vector<StateId> region;
    for (StateId s = 0; s < d.state_count(); ++s)
      if (s == 0 || rng() % 2) region.push_back(s);
    double prev = 0;
    for (std::uint32_t k = 1; k <= 12; ++k) {
      double v = region_leakiness(d, region, 0, k);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
      REQUIRE(v >= prev - 1e-15);
      prev = v;
    }
    auto est = oracle::monte_carlo_leakiness(d, region, 0, 5, 20000, 1000 + i);
    double v = region_leakiness(d, region, 0, 5);
    double tolerance = 4 * std::max(est.standard_error, 1e-3);
    CHECK(std::abs(v - est.mean) <= tolerance);
  }
}

TEST_CASE("detect: hyper mode") {
  Dfa g = golden();
  DetectorConfig cfg;
  cfg.lambda = 0.0;
  CHECK_FALSE(detect(g, cfg).has_value());

  Dfa cycle = make_dfa({1, 2, 3, 0}, {});
  cfg.lambda = 0.05;
  auto plan = detect(cycle, cfg);
  REQUIRE(plan);
  CHECK(plan->members == std::vector<StateId>{0, 1, 2, 3});
  CHECK(plan->leakiness == 0.0);
  cfg.lambda = 0.0;
  CHECK_FALSE(detect(cycle, cfg).has_value());

  cfg.sigma = 0;
  cfg.lambda = 1.0;
  cfg.leak_depth = 9;
  auto gp = detect(g, cfg);
  REQUIRE(gp);
  CHECK(gp->members == std::vector<StateId>{0, 1, 2, 3, 4});
  CHECK(gp->leakiness < 1.0);

  DetectorConfig defaults;
  auto dp = detect(g, defaults);
  REQUIRE(dp);
  CHECK(dp->members.size() == 5);

  cfg.mode = RegionMode::None;
  CHECK_FALSE(detect(g, cfg).has_value());
}

TEST_CASE("detect: falls through to the next qualifying SCC") {
  // SCC {0,1}: 0 and 1 alternate but leak half their bytes to the accept
  // state 2, which feeds the closed cycle {3,4}.
  std::vector<Edit> edits;
  for (unsigned b = 0; b < 128; ++b) {
    edits.push_back({0, b, 1});
    edits.push_back({1, b, 0});
  }
  Dfa d = make_dfa({2, 2, 3, 4, 3}, edits, {2});
  DetectorConfig cfg;
  cfg.sigma = 0;
  auto report = detect_with_report(d, cfg);
  REQUIRE(report.candidates.size() >= 2);
  CHECK_FALSE(report.candidates[0].accepted);
  CHECK(report.candidates[0].scc.members == std::vector<StateId>{0, 1});
  REQUIRE(report.accepted);
  CHECK(report.accepted->members == std::vector<StateId>{3, 4});
  CHECK(report.reason == "accepted");
}

TEST_CASE("detect: single-state regions are rejected") {
  Dfa self = make_dfa({0, 0}, {{0, 'a', 1}}, {1});
  DetectorConfig cfg;
  cfg.sigma = 0;
  cfg.lambda = 1.0;
  CHECK_FALSE(detect(self, cfg).has_value());
}

TEST_CASE("detect: accepted plans satisfy their invariants") {
  std::mt19937_64 rng(23);
  int accepted = 0;
  for (int i = 0; i < 300; ++i) {
    Dfa d = oracle::random_dfa(rng, 2 + rng() % 80, 0.15, 2 + rng() % 6);
    DetectorConfig cfg;
    cfg.sigma = static_cast<std::uint32_t>(rng() % 200);
    cfg.lambda = (rng() % 100) / 100.0;
    cfg.leak_depth = 1 + static_cast<std::uint32_t>(rng() % 9);
    cfg.capacity = 1 + static_cast<std::uint32_t>(rng() % 63);
    auto plan = detect(d, cfg);
    if (!plan) continue;
    ++accepted;
    REQUIRE(plan->members.size() >= 2);
    REQUIRE(plan->members.size() <= cfg.capacity);
    REQUIRE(plan->members.front() == plan->start);
    REQUIRE(plan->leakiness < cfg.lambda);
    std::set<StateId> uniq(plan->members.begin(), plan->members.end());
    REQUIRE(uniq.size() == plan->members.size());
    for (auto m : plan->members) REQUIRE_FALSE(d.is_accept(m));
    REQUIRE(plan->leakiness == region_leakiness(d, plan->members, plan->start, cfg.leak_depth));
  }
  CHECK(accepted > 10);
}

TEST_CASE("random mode") {
  Dfa g = golden();
  DetectorConfig cfg;
  cfg.mode = RegionMode::Random;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    auto a = detect(g, cfg);
    auto b = detect(g, cfg);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->members == b->members);
    CHECK(a->members.size() <= 5);
    CHECK((a->start == 0 || a->start == 1 || a->start == 2));
    for (auto m : a->members) CHECK(m != 5);
  }
  cfg.seed = 0;
  REQUIRE(random_region(g, cfg));

  // Only the start is eligible and every successor accepts, so the
  // region cannot grow past one state.
  Dfa all_acc = make_dfa({1, 2, 3, 3}, {}, {1, 2, 3});
  auto lone = random_region(all_acc, cfg);
  CHECK_FALSE(lone.has_value());
}

TEST_CASE("detector config validation") {
  DetectorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.capacity = 64;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.capacity = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.lambda = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.leak_depth = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_region_mode("random") == RegionMode::Random);
  CHECK_THROWS_AS(parse_region_mode("bogus"), Error);
}
