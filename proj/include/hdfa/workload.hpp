#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hdfa/engine.hpp"

namespace hdfa {

/// Reproducible mixed ruleset: mostly literals, plus digit runs, bounded
/// gaps, single wildcards and small alternations.
std::vector<std::string> synthetic_ruleset(std::size_t count, std::uint64_t seed);

/// Random walk that, while inside the region, only picks bytes keeping it
/// there. Outside the region bytes are uniform. Without a region the
/// output is uniform noise.
std::vector<std::uint8_t> region_circulating_input(const HybridDb& db, std::size_t length, std::uint64_t seed);

/// Bytes that move some region state somewhere other than its most common
/// successor. Biasing inputs toward these exercises escapes and re-entries.
std::vector<std::uint8_t> region_progress_bytes(const HybridDb& db);

/// Deterministic input stream for differential testing: geometric lengths,
/// each case mixing uniform bytes with region progress bytes.
class CaseGenerator {
 public:
  CaseGenerator(const HybridDb& db, std::uint64_t seed, double mean_length = 512.0);
  std::vector<std::uint8_t> next();

 private:
  std::mt19937_64 rng_;
  std::vector<std::uint8_t> biased_;
  double mean_length_;
};

struct ScanResult {
  StreamState final_state;
  std::vector<MatchEvent> events;
  friend bool operator==(const ScanResult&, const ScanResult&) = default;
};

ScanResult run_engine(const HybridDb& db, std::span<const std::uint8_t> input, EngineKind engine,
                      const EngineOptions& options = {});

struct Divergence {
  std::size_t case_index = 0;
  std::vector<std::uint8_t> input;    // shrunk reproducer
  std::size_t original_length = 0;
  ScanResult hybrid;
  ScanResult scalar;
};

struct DifftestConfig {
  std::size_t cases = 1000;
  std::uint64_t seed = 0;
  double mean_length = 512.0;
  EngineOptions options;
};

struct DifftestResult {
  std::size_t cases_run = 0;
  std::uint64_t bytes_scanned = 0;
  std::optional<Divergence> divergence;
};

/// Runs hybrid against scalar on generated cases and stops at the first
/// divergence, shrinking it by binary search on prefix and suffix.
DifftestResult run_difftest(const HybridDb& db, const DifftestConfig& config);

std::vector<std::uint8_t> shrink_divergence(const HybridDb& db, std::vector<std::uint8_t> input,
                                            const EngineOptions& options);

}  // namespace hdfa
