#include "hdfa/hybrid_db.hpp"

#include <algorithm>
#include <string>

#include "hdfa/error.hpp"

namespace hdfa {

Vector64 Vector64::identity() noexcept {
  Vector64 v;
  for (std::size_t i = 0; i < kLanes; ++i) v.lanes[i] = static_cast<std::uint8_t>(i);
  return v;
}

Vector64 Vector64::broadcast(std::uint8_t x) noexcept {
  Vector64 v;
  v.lanes.fill(x);
  return v;
}

StateRenumbering::StateRenumbering(std::size_t dfa_states, std::span<const StateId> region_members)
    : to_runtime_(dfa_states, kGutterState) {
  if (region_members.size() > kMaxRegionStates) {
    throw CapacityError("region of " + std::to_string(region_members.size()) + " states exceeds 63");
  }
  region_size_ = static_cast<std::uint32_t>(region_members.size());
  std::vector<char> in_region(dfa_states, 0);
  for (std::size_t i = 0; i < region_members.size(); ++i) {
    StateId s = region_members.begin()[i];
    if (s >= dfa_states || in_region[s]) throw Error("region members must be distinct DFA states");
    in_region[s] = 1;
    to_runtime_[s] = static_cast<RuntimeId>(i);
  }
  RuntimeId next = kOuterBase;
  for (StateId s = 0; s < dfa_states; ++s)
    if (!in_region[s]) to_runtime_[s] = next++;
  to_original_.assign(next, -1);
  for (StateId s = 0; s < dfa_states; ++s) to_original_[to_runtime_[s]] = s;
}

StateRenumbering StateRenumbering::identity(std::size_t dfa_states) {
  StateRenumbering m;
  m.to_runtime_.resize(dfa_states);
  m.to_original_.resize(dfa_states);
  for (StateId s = 0; s < dfa_states; ++s) {
    m.to_runtime_[s] = s;
    m.to_original_[s] = s;
  }
  return m;
}

std::optional<StateId> StateRenumbering::to_original(RuntimeId r) const {
  if (r >= to_original_.size() || to_original_[r] < 0) return std::nullopt;
  return static_cast<StateId>(to_original_[r]);
}

OuterTable::OuterTable(std::size_t rows, std::vector<RuntimeId> cells) : rows_(rows), cells_(std::move(cells)) {
  if (cells_.size() != rows_ * kAlphabetSize) {
    throw DatabaseError(DbErrorKind::InvariantViolation, "outer table is not rows x 256");
  }
}

namespace {

[[noreturn]] void violation(const std::string& what) { throw DatabaseError(DbErrorKind::InvariantViolation, what); }

}  // namespace

bool HybridDb::is_live(RuntimeId s) const noexcept {
  if (s >= parts_.outer.rows()) return false;
  if (!has_region()) return true;
  return s < parts_.region_size || s >= kOuterBase;
}

HybridDb::HybridDb(Parts parts) : parts_(std::move(parts)) {
  const std::uint32_t k = parts_.region_size;
  if (k > kMaxRegionStates) violation("region size exceeds 63");
  if (parts_.dfa_states == 0) violation("empty automaton");
  if (k > 0 && k > parts_.dfa_states) violation("region larger than automaton");
  const std::size_t rows = k > 0 ? kOuterBase + parts_.dfa_states - k : parts_.dfa_states;
  if (parts_.outer.rows() != rows) violation("outer table row count does not match state count");
  if (!is_live(parts_.start)) violation("start state is not a live runtime id");
  if (parts_.params.batch < 1 || parts_.params.batch > kMaxBatch) violation("batch length out of range");
  if (!(parts_.params.lambda >= 0.0 && parts_.params.lambda <= 1.0)) violation("leakiness threshold out of range");
  if (parts_.params.leak_depth < 1) violation("leak depth out of range");

  const auto& outer = parts_.outer;
  for (RuntimeId r = 0; r < rows; ++r) {
    const bool live = is_live(r);
    for (std::size_t b = 0; b < kAlphabetSize; ++b) {
      RuntimeId t = outer.next(r, static_cast<std::uint8_t>(b));
      if (live ? !is_live(t) : t != kGutterState) violation("outer table entry is not a valid runtime id");
    }
  }

  for (std::size_t i = 0; i < parts_.accepts.size(); ++i) {
    const AcceptEntry& e = parts_.accepts[i];
    if (!is_live(e.state)) violation("accept entry names a non-live state");
    if (in_region(e.state)) violation("accept state inside the region");
    if (i > 0) {
      const AcceptEntry& p = parts_.accepts[i - 1];
      if (p.state > e.state || (p.state == e.state && p.pattern >= e.pattern)) violation("accept map not sorted");
    }
  }

  const std::size_t tables = k > 0 ? kAlphabetSize : 0;
  if (parts_.shuffle.size() != tables || parts_.gutter.size() != tables) violation("lane table size mismatch");
  if (k > 0) {
    for (std::size_t b = 0; b < kAlphabetSize; ++b) {
      const Vector64& g = parts_.gutter[b];
      const Vector64& s = parts_.shuffle[b];
      for (std::size_t lane = 0; lane < kLanes; ++lane) {
        if (lane >= k) {
          if (g[lane] != kGutterState) violation("gutter filler lane is not the sink");
          continue;
        }
        RuntimeId t = outer.next(static_cast<RuntimeId>(lane), static_cast<std::uint8_t>(b));
        RuntimeId want = t < k ? t : kGutterState;
        if (g[lane] != want) violation("gutter lane disagrees with the outer table");
        if (t < k && s[lane] != t) violation("shuffle lane disagrees with the outer table");
      }
    }
  }

  if (parts_.renumbering) {
    const auto& m = *parts_.renumbering;
    if (m.region_size() != k || m.dfa_states() != parts_.dfa_states || m.runtime_rows() != rows) {
      violation("renumbering does not match the database");
    }
  }

  accept_begin_.assign(rows + 1, 0);
  for (const AcceptEntry& e : parts_.accepts) ++accept_begin_[e.state + 1];
  for (std::size_t r = 0; r < rows; ++r) accept_begin_[r + 1] += accept_begin_[r];
  accept_ids_.resize(parts_.accepts.size());
  for (std::size_t i = 0; i < parts_.accepts.size(); ++i) accept_ids_[i] = parts_.accepts[i].pattern;
}

StateId HybridDb::dense_index(RuntimeId s) const {
  if (!is_live(s)) throw Error("not a live runtime id: " + std::to_string(s));
  if (has_region() && s >= kOuterBase) return s - kOuterBase + parts_.region_size;
  return s;
}

Dfa HybridDb::to_dfa() const {
  const std::size_t n = parts_.dfa_states;
  std::vector<StateId> table(n * kAlphabetSize);
  std::vector<std::vector<PatternId>> accepts(n);
  for (RuntimeId r = 0; r < parts_.outer.rows(); ++r) {
    if (!is_live(r)) continue;
    StateId d = dense_index(r);
    for (std::size_t b = 0; b < kAlphabetSize; ++b)
      table[d * kAlphabetSize + b] = dense_index(parts_.outer.next(r, static_cast<std::uint8_t>(b)));
    auto acc = this->accepts(r);
    accepts[d].assign(acc.begin(), acc.end());
  }
  return Dfa(std::move(table), dense_index(parts_.start), std::move(accepts));
}

StateRenumbering renumber(const Dfa& dfa, const RegionPlan& plan) {
  return StateRenumbering(dfa.state_count(), plan.members);
}

OuterTable build_outer_table(const Dfa& dfa, const StateRenumbering& map) {
  const std::size_t rows = map.runtime_rows();
  std::vector<RuntimeId> cells(rows * kAlphabetSize, kGutterState);
  for (StateId u = 0; u < dfa.state_count(); ++u) {
    RuntimeId r = map.to_runtime(u);
    for (std::size_t b = 0; b < kAlphabetSize; ++b)
      cells[static_cast<std::size_t>(r) * kAlphabetSize + b] = map.to_runtime(dfa.next(u, static_cast<std::uint8_t>(b)));
  }
  return OuterTable(rows, std::move(cells));
}

LaneTables build_shuffle_tables(const Dfa& dfa, const StateRenumbering& map) {
  const std::uint32_t k = map.region_size();
  if (k < 2) throw Error("lane tables need a region of at least two states");
  LaneTables t{LaneTable(kAlphabetSize, Vector64::broadcast(kGutterState)),
               LaneTable(kAlphabetSize, Vector64::broadcast(kGutterState))};
  for (std::size_t b = 0; b < kAlphabetSize; ++b) {
    for (RuntimeId lane = 0; lane < k; ++lane) {
      StateId orig = *map.to_original(lane);
      RuntimeId succ = map.to_runtime(dfa.next(orig, static_cast<std::uint8_t>(b)));
      // Out-of-region successors do not fit in a lane; only the gutter
      // table encodes them faithfully (as the sink).
      t.shuffle[b][lane] = static_cast<std::uint8_t>(succ & 63u);
      t.gutter[b][lane] = static_cast<std::uint8_t>(succ < k ? succ : kGutterState);
    }
  }
  return t;
}

HybridDb assemble(const Dfa& dfa, const std::optional<RegionPlan>& plan, const EngineParams& params) {
  HybridDb::Parts parts;
  parts.dfa_states = static_cast<std::uint32_t>(dfa.state_count());
  parts.params = params;
  StateRenumbering map = plan ? renumber(dfa, *plan) : StateRenumbering::identity(dfa.state_count());
  parts.region_size = map.region_size();
  parts.start = map.to_runtime(dfa.start());
  parts.outer = build_outer_table(dfa, map);
  if (plan) {
    auto lanes = build_shuffle_tables(dfa, map);
    parts.shuffle = std::move(lanes.shuffle);
    parts.gutter = std::move(lanes.gutter);
  }
  for (StateId s = 0; s < dfa.state_count(); ++s)
    for (PatternId p : dfa.accepts(s)) parts.accepts.push_back({map.to_runtime(s), p});
  std::sort(parts.accepts.begin(), parts.accepts.end(), [](const AcceptEntry& a, const AcceptEntry& b) {
    return a.state != b.state ? a.state < b.state : a.pattern < b.pattern;
  });
  parts.renumbering = std::move(map);
  return HybridDb(std::move(parts));
}

}  // namespace hdfa
