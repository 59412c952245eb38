#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "hdfa/dfa.hpp"
#include "hdfa/region.hpp"

namespace hdfa {

/// Runtime state number. Region states take 0..k-1, 63 is the gutter sink,
/// outer states start at 64. Scalar-only databases keep DFA ids.
using RuntimeId = std::uint32_t;

inline constexpr std::size_t kLanes = 64;
inline constexpr RuntimeId kGutterState = 63;
inline constexpr RuntimeId kOuterBase = 64;
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint32_t kMaxBatch = 64;

struct alignas(64) Vector64 {
  std::array<std::uint8_t, kLanes> lanes{};

  std::uint8_t& operator[](std::size_t i) noexcept { return lanes[i]; }
  std::uint8_t operator[](std::size_t i) const noexcept { return lanes[i]; }

  static Vector64 identity() noexcept;
  static Vector64 broadcast(std::uint8_t v) noexcept;

  friend bool operator==(const Vector64&, const Vector64&) = default;
};

/// One 64-lane vector per input byte value; lane s is the successor of
/// region state s.
using LaneTable = std::vector<Vector64>;

/// Bijection between DFA state ids and runtime ids (63 excluded).
class StateRenumbering {
 public:
  StateRenumbering() = default;
  /// Region members (in order) take 0..k-1, the rest 64.. by ascending id.
  StateRenumbering(std::size_t dfa_states, std::span<const StateId> region_members);
  /// Scalar-only: runtime id == DFA id.
  static StateRenumbering identity(std::size_t dfa_states);

  RuntimeId to_runtime(StateId s) const { return to_runtime_.at(s); }
  std::optional<StateId> to_original(RuntimeId r) const;

  std::uint32_t region_size() const noexcept { return region_size_; }
  std::size_t dfa_states() const noexcept { return to_runtime_.size(); }
  /// Number of OuterTable rows needed: max runtime id + 1.
  std::size_t runtime_rows() const noexcept { return to_original_.size(); }

 private:
  std::vector<RuntimeId> to_runtime_;
  std::vector<std::int64_t> to_original_;  // -1 for unused ids
  std::uint32_t region_size_ = 0;
};

/// Traditional table over runtime ids: rows x 256 successors.
class OuterTable {
 public:
  OuterTable() = default;
  OuterTable(std::size_t rows, std::vector<RuntimeId> cells);

  std::size_t rows() const noexcept { return rows_; }
  RuntimeId next(RuntimeId s, std::uint8_t b) const noexcept {
    return cells_[static_cast<std::size_t>(s) * kAlphabetSize + b];
  }
  std::span<const RuntimeId> cells() const noexcept { return cells_; }

  friend bool operator==(const OuterTable&, const OuterTable&) = default;

 private:
  std::size_t rows_ = 0;
  std::vector<RuntimeId> cells_;
};

struct EngineParams {
  std::uint32_t batch = 9;
  std::uint32_t sigma = 30;
  double lambda = 0.05;
  std::uint32_t leak_depth = 9;

  friend bool operator==(const EngineParams&, const EngineParams&) = default;
};

struct AcceptEntry {
  RuntimeId state;
  PatternId pattern;
  friend bool operator==(const AcceptEntry&, const AcceptEntry&) = default;
};

/// Immutable runtime database. All invariants are checked on construction;
/// violations raise DatabaseError(InvariantViolation).
class HybridDb {
 public:
  struct Parts {
    std::uint32_t dfa_states = 0;
    std::uint32_t region_size = 0;  // k, 0 for scalar-only
    RuntimeId start = 0;
    std::vector<AcceptEntry> accepts;
    OuterTable outer;
    LaneTable shuffle;  // 256 entries when k > 0
    LaneTable gutter;   // 256 entries when k > 0
    EngineParams params;
    std::optional<StateRenumbering> renumbering;  // not serialized
  };

  explicit HybridDb(Parts parts);

  bool has_region() const noexcept { return parts_.region_size > 0; }
  std::uint32_t region_size() const noexcept { return parts_.region_size; }
  /// Largest region runtime id, -1 for scalar-only databases.
  int s_limit() const noexcept { return static_cast<int>(parts_.region_size) - 1; }
  bool in_region(RuntimeId s) const noexcept { return static_cast<std::int64_t>(s) <= s_limit(); }

  std::uint32_t dfa_states() const noexcept { return parts_.dfa_states; }
  RuntimeId start() const noexcept { return parts_.start; }
  const OuterTable& outer() const noexcept { return parts_.outer; }
  const LaneTable& shuffle() const noexcept { return parts_.shuffle; }
  const LaneTable& gutter() const noexcept { return parts_.gutter; }
  const EngineParams& params() const noexcept { return parts_.params; }
  std::span<const AcceptEntry> accept_entries() const noexcept { return parts_.accepts; }
  const std::optional<StateRenumbering>& renumbering() const noexcept { return parts_.renumbering; }

  /// A runtime id that names a DFA state (not the sink or unused filler).
  bool is_live(RuntimeId s) const noexcept;

  /// Pattern ids accepted on entering runtime state `s`, ascending.
  std::span<const PatternId> accepts(RuntimeId s) const noexcept {
    return {accept_ids_.data() + accept_begin_[s], accept_begin_[s + 1] - accept_begin_[s]};
  }
  bool is_accept(RuntimeId s) const noexcept { return accept_begin_[s + 1] != accept_begin_[s]; }

  // Flat views used by the scan kernels.
  const std::uint32_t* accept_begin_data() const noexcept { return accept_begin_.data(); }
  const PatternId* accept_ids_data() const noexcept { return accept_ids_.data(); }

  /// Reconstructs the DFA over live runtime ids. Live ids are compacted in
  /// ascending order, so region state r keeps index r.
  Dfa to_dfa() const;
  /// Dense index of a live runtime id within to_dfa().
  StateId dense_index(RuntimeId s) const;

 private:
  Parts parts_;
  std::vector<std::uint32_t> accept_begin_;
  std::vector<PatternId> accept_ids_;
};

StateRenumbering renumber(const Dfa& dfa, const RegionPlan& plan);
OuterTable build_outer_table(const Dfa& dfa, const StateRenumbering& map);

struct LaneTables {
  LaneTable shuffle;
  LaneTable gutter;
};
LaneTables build_shuffle_tables(const Dfa& dfa, const StateRenumbering& map);

/// Builds the runtime database; without a plan the result is scalar-only
/// and keeps the original numbering.
HybridDb assemble(const Dfa& dfa, const std::optional<RegionPlan>& plan, const EngineParams& params = {});

std::vector<std::uint8_t> serialize(const HybridDb& db);
HybridDb deserialize(std::span<const std::uint8_t> bytes);

/// File helpers; I/O failures raise IoError, format problems DatabaseError.
void save_database(const std::filesystem::path& path, const HybridDb& db);
HybridDb load_database(const std::filesystem::path& path);

}  // namespace hdfa
