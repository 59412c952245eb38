#include "hdfa/region.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "hdfa/error.hpp"

namespace hdfa {

const char* to_string(RegionMode mode) noexcept {
  switch (mode) {
    case RegionMode::Hyper: return "hyper";
    case RegionMode::Random: return "random";
    case RegionMode::None: return "none";
  }
  return "?";
}

RegionMode parse_region_mode(std::string_view text) {
  if (text == "hyper") return RegionMode::Hyper;
  if (text == "random") return RegionMode::Random;
  if (text == "none") return RegionMode::None;
  throw Error("unknown region mode '" + std::string(text) + "'");
}

void DetectorConfig::validate() const {
  if (capacity < 1 || capacity > kMaxRegionStates) throw Error("region capacity must be in 1..63");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("leakiness threshold must be in [0,1]");
  if (leak_depth < 1) throw Error("leak depth must be at least 1");
}

namespace {

constexpr std::uint32_t kNoDistance = std::numeric_limits<std::uint32_t>::max();

// Distinct successors of every state, for graph algorithms that ignore labels.
std::vector<std::vector<StateId>> successor_lists(const Dfa& dfa) {
  std::vector<std::vector<StateId>> out(dfa.state_count());
  for (StateId s = 0; s < dfa.state_count(); ++s) {
    auto row = dfa.row(s);
    std::vector<StateId> succ(row.begin(), row.end());
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    out[s] = std::move(succ);
  }
  return out;
}

std::uint64_t stickiness_sum(const Dfa& dfa, std::span<const StateId> members, std::span<const std::uint32_t> sticky) {
  std::uint64_t sum = 0;
  for (StateId s : members)
    if (!dfa.is_accept(s)) sum += sticky[s];
  return sum;
}

// Level-synchronous BFS; `preferred` states go first within a level.
std::vector<StateId> grow_region(const Dfa& dfa, StateId start, const std::vector<char>& preferred,
                                 std::uint32_t capacity) {
  std::vector<StateId> members;
  if (dfa.is_accept(start) || capacity == 0) return members;
  std::vector<char> visited(dfa.state_count(), 0);
  visited[start] = 1;
  members.push_back(start);
  std::vector<StateId> level{start};
  std::vector<StateId> next;
  while (!level.empty() && members.size() < capacity) {
    next.clear();
    for (StateId u : level) {
      for (StateId v : dfa.row(u)) {
        if (visited[v] || dfa.is_accept(v)) continue;
        visited[v] = 1;
        next.push_back(v);
      }
    }
    std::sort(next.begin(), next.end(), [&](StateId a, StateId b) {
      bool pa = !preferred.empty() && preferred[a];
      bool pb = !preferred.empty() && preferred[b];
      if (pa != pb) return pa;
      return a < b;
    });
    if (members.size() + next.size() > capacity) next.resize(capacity - members.size());
    members.insert(members.end(), next.begin(), next.end());
    level.swap(next);
  }
  return members;
}

}  // namespace

std::vector<SccInfo> compute_sccs(const Dfa& dfa) {
  const std::size_t n = dfa.state_count();
  const auto succ = successor_lists(dfa);
  const auto sticky = all_stickiness(dfa);
  const auto dist = bfs_distances(dfa);

  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<StateId> stack;
  std::vector<SccInfo> out;
  std::uint32_t counter = 0;

  struct Frame {
    StateId v;
    std::size_t next_edge;
  };
  std::vector<Frame> call;

  for (StateId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& edges = succ[f.v];
      if (f.next_edge < edges.size()) {
        StateId w = edges[f.next_edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      StateId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] != index[v]) continue;
      SccInfo scc;
      StateId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        scc.members.push_back(w);
      } while (w != v);
      std::sort(scc.members.begin(), scc.members.end());
      scc.stickiness_sum = stickiness_sum(dfa, scc.members, sticky);
      scc.distance = kNoDistance;
      for (StateId m : scc.members) scc.distance = std::min(scc.distance, dist[m]);
      out.push_back(std::move(scc));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SccInfo& a, const SccInfo& b) { return a.members.front() < b.members.front(); });
  return out;
}

std::vector<std::uint32_t> all_stickiness(const Dfa& dfa) {
  std::vector<ByteSet> in_bytes(dfa.state_count());
  for (StateId u = 0; u < dfa.state_count(); ++u) {
    auto row = dfa.row(u);
    for (std::size_t b = 0; b < kAlphabetSize; ++b) in_bytes[row[b]].set(b);
  }
  std::vector<std::uint32_t> out(dfa.state_count());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = static_cast<std::uint32_t>(in_bytes[s].count());
  return out;
}

std::uint32_t state_stickiness(const Dfa& dfa, StateId s) {
  ByteSet in;
  for (StateId u = 0; u < dfa.state_count(); ++u) {
    auto row = dfa.row(u);
    for (std::size_t b = 0; b < kAlphabetSize; ++b)
      if (row[b] == s) in.set(b);
  }
  return static_cast<std::uint32_t>(in.count());
}

std::vector<std::uint32_t> bfs_distances(const Dfa& dfa) {
  std::vector<std::uint32_t> dist(dfa.state_count(), kNoDistance);
  std::deque<StateId> queue{dfa.start()};
  dist[dfa.start()] = 0;
  while (!queue.empty()) {
    StateId u = queue.front();
    queue.pop_front();
    for (StateId v : dfa.row(u)) {
      if (dist[v] == kNoDistance) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::uint32_t scc_distance(const Dfa& dfa, const SccInfo& scc) {
  const auto dist = bfs_distances(dfa);
  std::uint32_t best = kNoDistance;
  for (StateId m : scc.members) best = std::min(best, dist[m]);
  return best;
}

namespace {

std::vector<SccInfo> by_distance(std::vector<SccInfo> sccs) {
  std::stable_sort(sccs.begin(), sccs.end(), [](const SccInfo& a, const SccInfo& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.members.front() < b.members.front();
  });
  return sccs;
}

}  // namespace

std::vector<SccInfo> qualifying_sccs(const Dfa& dfa, const DetectorConfig& cfg) {
  std::vector<SccInfo> out;
  for (auto& scc : by_distance(compute_sccs(dfa)))
    if (scc.stickiness_sum > cfg.sigma) out.push_back(std::move(scc));
  return out;
}

std::optional<SccInfo> select_start_scc(const Dfa& dfa, const DetectorConfig& cfg) {
  auto q = qualifying_sccs(dfa, cfg);
  if (q.empty()) return std::nullopt;
  return std::move(q.front());
}

RegionPlan expand_region(const Dfa& dfa, const SccInfo& scc, const DetectorConfig& cfg) {
  const auto dist = bfs_distances(dfa);
  RegionPlan plan;
  plan.stickiness_sum = scc.stickiness_sum;
  std::optional<StateId> start;
  for (StateId m : scc.members) {
    if (dfa.is_accept(m)) continue;
    if (!start || dist[m] < dist[*start]) start = m;
  }
  if (!start) return plan;
  std::vector<char> preferred(dfa.state_count(), 0);
  for (StateId m : scc.members) preferred[m] = 1;
  plan.start = *start;
  plan.members = grow_region(dfa, *start, preferred, cfg.capacity);
  return plan;
}

std::vector<EdgeBundle> edge_bundles(const Dfa& dfa, StateId s) {
  std::vector<EdgeBundle> out;
  auto row = dfa.row(s);
  for (std::size_t b = 0; b < kAlphabetSize; ++b) {
    auto it = std::find_if(out.begin(), out.end(), [&](const EdgeBundle& e) { return e.destination == row[b]; });
    if (it == out.end()) {
      out.push_back({s, row[b], {}});
      it = std::prev(out.end());
    }
    it->bytes.set(b);
  }
  return out;
}

double region_leakiness(const Dfa& dfa, std::span<const StateId> region, StateId start, std::uint32_t depth) {
  std::vector<std::int32_t> slot(dfa.state_count(), -1);
  for (std::size_t i = 0; i < region.size(); ++i) slot[region[i]] = static_cast<std::int32_t>(i);
  if (slot[start] < 0) return 1.0;

  std::vector<std::vector<EdgeBundle>> bundles(region.size());
  for (std::size_t i = 0; i < region.size(); ++i) bundles[i] = edge_bundles(dfa, region[i]);

  std::vector<double> leak(region.size(), 0.0), next(region.size(), 0.0);
  for (std::uint32_t k = 0; k < depth; ++k) {
    for (std::size_t i = 0; i < region.size(); ++i) {
      double sum = 0.0;
      for (const EdgeBundle& e : bundles[i]) {
        std::int32_t d = slot[e.destination];
        sum += transit_probability(e) * (d < 0 ? 1.0 : leak[static_cast<std::size_t>(d)]);
      }
      next[i] = sum;
    }
    leak.swap(next);
  }
  return std::clamp(leak[static_cast<std::size_t>(slot[start])], 0.0, 1.0);
}

std::optional<RegionPlan> random_region(const Dfa& dfa, const DetectorConfig& cfg) {
  const auto dist = bfs_distances(dfa);
  std::vector<StateId> eligible;
  for (StateId s = 0; s < dfa.state_count(); ++s)
    if (dist[s] <= 2 && !dfa.is_accept(s)) eligible.push_back(s);
  if (eligible.empty()) return std::nullopt;

  std::mt19937_64 rng(cfg.seed);
  StateId start = eligible[rng() % eligible.size()];
  RegionPlan plan;
  plan.start = start;
  plan.members = grow_region(dfa, start, {}, cfg.capacity);
  if (plan.members.size() < 2) return std::nullopt;
  for (const auto& scc : compute_sccs(dfa)) {
    if (std::binary_search(scc.members.begin(), scc.members.end(), start)) plan.stickiness_sum = scc.stickiness_sum;
  }
  plan.leakiness = region_leakiness(dfa, plan.members, start, cfg.leak_depth);
  return plan;
}

DetectionReport detect_with_report(const Dfa& dfa, const DetectorConfig& cfg) {
  cfg.validate();
  DetectionReport report;
  report.mode = cfg.mode;
  report.sccs = by_distance(compute_sccs(dfa));
  report.scc_count = report.sccs.size();

  if (cfg.mode == RegionMode::None) {
    report.reason = "region detection disabled";
    return report;
  }
  if (cfg.mode == RegionMode::Random) {
    report.accepted = random_region(dfa, cfg);
    report.reason = report.accepted ? "accepted" : "no eligible random start";
    return report;
  }

  for (const SccInfo& scc : report.sccs) {
    if (scc.stickiness_sum <= cfg.sigma) continue;
    CandidateReport c;
    c.scc = scc;
    c.plan = expand_region(dfa, scc, cfg);
    if (c.plan.members.size() < 2) {
      c.reason = "region smaller than two states";
    } else {
      c.plan.leakiness = region_leakiness(dfa, c.plan.members, c.plan.start, cfg.leak_depth);
      if (c.plan.leakiness < cfg.lambda) {
        c.accepted = true;
        c.reason = "accepted";
      } else {
        c.reason = "leakiness not below threshold";
      }
    }
    report.candidates.push_back(c);
    if (c.accepted) {
      report.accepted = c.plan;
      report.reason = "accepted";
      return report;
    }
  }
  report.reason = report.candidates.empty() ? "no SCC exceeds the stickiness threshold"
                                            : "every candidate region was rejected";
  return report;
}

std::optional<RegionPlan> detect(const Dfa& dfa, const DetectorConfig& cfg) {
  return detect_with_report(dfa, cfg).accepted;
}

}  // namespace hdfa
