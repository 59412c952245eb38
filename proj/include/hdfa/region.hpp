#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdfa/dfa.hpp"

namespace hdfa {

enum class RegionMode { Hyper, Random, None };

const char* to_string(RegionMode mode) noexcept;
/// Parses "hyper", "random" or "none"; throws hdfa::Error otherwise.
RegionMode parse_region_mode(std::string_view text);

inline constexpr std::uint32_t kMaxRegionStates = 63;

struct DetectorConfig {
  std::uint32_t sigma = 30;        // stickiness threshold, strict '>'
  double lambda = 0.05;            // leakiness threshold, strict '<'
  std::uint32_t leak_depth = 9;
  std::uint32_t capacity = kMaxRegionStates;
  RegionMode mode = RegionMode::Hyper;
  std::uint64_t seed = 0;

  /// Throws hdfa::Error when a field is outside its documented range.
  void validate() const;
};

struct SccInfo {
  std::vector<StateId> members;  // ascending
  std::uint64_t stickiness_sum = 0;  // over non-accept members
  std::uint32_t distance = 0;        // min BFS distance from the start state
};

struct RegionPlan {
  std::vector<StateId> members;  // order of addition; members[0] is the start
  StateId start = 0;
  std::uint64_t stickiness_sum = 0;
  double leakiness = 0.0;
};

/// All bytes of one state that lead to the same destination.
struct EdgeBundle {
  StateId source = 0;
  StateId destination = 0;
  ByteSet bytes;
  std::size_t width() const noexcept { return bytes.count(); }
};

/// Tarjan decomposition; SCCs come back ordered by smallest member id.
std::vector<SccInfo> compute_sccs(const Dfa& dfa);

/// Number of distinct byte values labelling edges into `s`.
std::uint32_t state_stickiness(const Dfa& dfa, StateId s);
std::vector<std::uint32_t> all_stickiness(const Dfa& dfa);

/// Unweighted BFS distances from the start state.
std::vector<std::uint32_t> bfs_distances(const Dfa& dfa);
std::uint32_t scc_distance(const Dfa& dfa, const SccInfo& scc);

/// SCCs whose stickiness sum exceeds sigma, nearest to the start first
/// (ties by smallest member id).
std::vector<SccInfo> qualifying_sccs(const Dfa& dfa, const DetectorConfig& cfg);
std::optional<SccInfo> select_start_scc(const Dfa& dfa, const DetectorConfig& cfg);

/// Breadth-first growth from the SCC member nearest to the start state.
/// Within one BFS level, members of `scc` are added before other states and
/// ties go to the smaller id. Accept states are never added.
RegionPlan expand_region(const Dfa& dfa, const SccInfo& scc, const DetectorConfig& cfg);

std::vector<EdgeBundle> edge_bundles(const Dfa& dfa, StateId s);

inline double transit_probability(const EdgeBundle& e) noexcept {
  return static_cast<double>(e.width()) / 256.0;
}

/// Probability that a walk from `start` under uniformly random bytes leaves
/// `region` within `depth` steps.
double region_leakiness(const Dfa& dfa, std::span<const StateId> region, StateId start, std::uint32_t depth);

/// Uniform pick among non-accept states within distance 2 of the start,
/// then plain BFS growth. Nothing when no start is eligible or the grown
/// region has fewer than two states.
std::optional<RegionPlan> random_region(const Dfa& dfa, const DetectorConfig& cfg);

struct CandidateReport {
  SccInfo scc;
  RegionPlan plan;
  bool accepted = false;
  std::string reason;
};

struct DetectionReport {
  RegionMode mode = RegionMode::Hyper;
  std::size_t scc_count = 0;
  std::vector<SccInfo> sccs;  // ascending distance, then smallest member
  std::vector<CandidateReport> candidates;
  std::optional<RegionPlan> accepted;
  std::string reason;  // why nothing was accepted, or "accepted"
};

DetectionReport detect_with_report(const Dfa& dfa, const DetectorConfig& cfg);
std::optional<RegionPlan> detect(const Dfa& dfa, const DetectorConfig& cfg);

}  // namespace hdfa
