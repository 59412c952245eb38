#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hdfa/hybrid_db.hpp"

namespace hdfa {

struct MatchEvent {
  PatternId pattern = 0;
  std::uint64_t offset = 0;  // bytes consumed when the accept state was entered

  friend bool operator==(const MatchEvent&, const MatchEvent&) = default;
};

using MatchSink = std::function<void(const MatchEvent&)>;

struct StreamState {
  RuntimeId state = 0;
  std::uint64_t consumed = 0;

  friend bool operator==(const StreamState&, const StreamState&) = default;
};

StreamState initial_state(const HybridDb& db) noexcept;

enum class PermuteBackend { Portable, Avx512Vbmi };

/// Best backend available on this CPU (and compiled in).
PermuteBackend default_backend() noexcept;
bool backend_available(PermuteBackend backend) noexcept;
const char* to_string(PermuteBackend backend) noexcept;

struct EngineOptions {
  /// Batches read the gutter table. Turning this off reads the plain
  /// shuffle table instead, which lets region escapes go unnoticed; it
  /// exists only to demonstrate that failure.
  bool use_gutter = true;
  std::optional<PermuteBackend> backend;  // default_backend() when unset
};

/// out[i] = table[idx[i] mod 64].
Vector64 permute64(const Vector64& table, const Vector64& idx);
Vector64 permute64(const Vector64& table, const Vector64& idx, PermuteBackend backend);

/// Composition of per-byte lane tables, first table applied first:
/// result[s] = tables[n-1][...tables[1][tables[0][s]]].
Vector64 compose_chain(std::span<const Vector64> tables);

inline RuntimeId scalar_step(const HybridDb& db, RuntimeId s, std::uint8_t b) noexcept {
  return db.outer().next(s, b);
}

/// Traditional table walk with accept reporting after every byte.
StreamState scalar_scan(const HybridDb& db, StreamState state, std::span<const std::uint8_t> input,
                        const MatchSink& emit);

struct BatchOutcome {
  enum class Kind { Completed, Escaped };
  Kind kind = Kind::Completed;
  RuntimeId final_state = 0;   // Completed: state after the whole batch
  std::uint32_t escape_index = 0;  // Escaped: 1-based position to replay from
  RuntimeId replay_state = 0;  // Escaped: in-region state before that position

  bool completed() const noexcept { return kind == Kind::Completed; }
};

/// One batch of exactly `db.params().batch` bytes from an in-region state.
/// The first floor(l/2) bytes are stepped one at a time (chain 1); the rest
/// are pre-composed into one lane table (chain 2) applied to chain 1's last
/// state. Throws hdfa::Error when s0 is outside the region or the byte
/// count is wrong.
BatchOutcome batch_step(const HybridDb& db, RuntimeId s0, std::span<const std::uint8_t> bytes,
                        const EngineOptions& options = {});

/// Normative escape search: smallest 1-based i with states[i-1] > limit.
std::optional<std::uint32_t> find_earliest_escape(std::span<const std::uint8_t> states, int limit) noexcept;

/// Word-parallel escape search over up to eight states: pack them into one
/// 64-bit word, flag every byte above the limit without branching, take the
/// lowest flag. Agrees exactly with find_earliest_escape().
std::optional<std::uint32_t> find_earliest_escape_packed(std::span<const std::uint8_t> states, int limit) noexcept;

/// Region states run in batches, everything else through the outer table.
/// Produces exactly the same final state and events as scalar_scan().
StreamState hybrid_scan(const HybridDb& db, StreamState state, std::span<const std::uint8_t> input,
                        const MatchSink& emit, const EngineOptions& options = {});

enum class EngineKind { Hybrid, Scalar };

/// Feeds one chunk of a longer stream. Offsets are absolute across chunks.
/// Throws StreamMismatch when `prior` cannot belong to `db`.
StreamState scan_stream(const HybridDb& db, StreamState prior, std::span<const std::uint8_t> chunk,
                        const MatchSink& emit, EngineKind engine = EngineKind::Hybrid,
                        const EngineOptions& options = {});

/// Convenience: scans from the initial state and collects every event.
std::vector<MatchEvent> collect_matches(const HybridDb& db, std::span<const std::uint8_t> input,
                                        EngineKind engine = EngineKind::Hybrid, const EngineOptions& options = {});

}  // namespace hdfa
