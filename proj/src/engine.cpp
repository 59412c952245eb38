#include "hdfa/engine.hpp"

#include <string>

#include "hdfa/error.hpp"
#include "scan_kernel.hpp"

namespace hdfa {

namespace {

const detail::KernelOps& kernel_for(PermuteBackend backend) {
  static const detail::KernelOps portable = detail::portable_kernel();
#if defined(HDFA_HAVE_AVX512)
  static const detail::KernelOps avx512 = detail::avx512_kernel();
  if (backend == PermuteBackend::Avx512Vbmi) {
    if (!backend_available(backend)) throw Error("AVX-512 VBMI backend not supported by this CPU");
    return avx512;
  }
#else
  if (backend == PermuteBackend::Avx512Vbmi) throw Error("AVX-512 VBMI backend not compiled in");
#endif
  return portable;
}

detail::KernelView view_of(const HybridDb& db, bool use_gutter) {
  const std::uint8_t* lanes = nullptr;
  if (db.has_region()) lanes = (use_gutter ? db.gutter() : db.shuffle()).front().lanes.data();
  return {db.outer().cells().data(), lanes,       db.s_limit(), db.params().batch,
          db.accept_begin_data(),    db.accept_ids_data()};
}

void emit_trampoline(void* ctx, std::uint32_t pattern, std::uint64_t offset) {
  (*static_cast<const MatchSink*>(ctx))(MatchEvent{pattern, offset});
}

}  // namespace

StreamState initial_state(const HybridDb& db) noexcept { return {db.start(), 0}; }

bool backend_available(PermuteBackend backend) noexcept {
  switch (backend) {
    case PermuteBackend::Portable:
      return true;
    case PermuteBackend::Avx512Vbmi:
#if defined(HDFA_HAVE_AVX512)
      return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512bw") &&
             __builtin_cpu_supports("avx512vbmi");
#else
      return false;
#endif
  }
  return false;
}

PermuteBackend default_backend() noexcept {
  static const PermuteBackend best =
      backend_available(PermuteBackend::Avx512Vbmi) ? PermuteBackend::Avx512Vbmi : PermuteBackend::Portable;
  return best;
}

const char* to_string(PermuteBackend backend) noexcept {
  return backend == PermuteBackend::Avx512Vbmi ? "avx512-vbmi" : "portable";
}

Vector64 permute64(const Vector64& table, const Vector64& idx, PermuteBackend backend) {
  Vector64 out;
  kernel_for(backend).permute(table.lanes.data(), idx.lanes.data(), out.lanes.data());
  return out;
}

Vector64 permute64(const Vector64& table, const Vector64& idx) { return permute64(table, idx, default_backend()); }

Vector64 compose_chain(std::span<const Vector64> tables) {
  if (tables.empty()) throw Error("compose_chain needs at least one table");
  Vector64 acc = tables.front();
  for (std::size_t i = 1; i < tables.size(); ++i) acc = permute64(tables[i], acc);
  return acc;
}

StreamState scalar_scan(const HybridDb& db, StreamState state, std::span<const std::uint8_t> input,
                        const MatchSink& emit) {
  RuntimeId s = state.state;
  const std::uint64_t base = state.consumed;
  const auto* outer = db.outer().cells().data();
  const auto* begin = db.accept_begin_data();
  const auto* ids = db.accept_ids_data();
  for (std::size_t i = 0; i < input.size(); ++i) {
    s = outer[static_cast<std::size_t>(s) * kAlphabetSize + input[i]];
    for (std::uint32_t a = begin[s]; a < begin[s + 1]; ++a) emit(MatchEvent{ids[a], base + i + 1});
  }
  return {s, base + input.size()};
}

BatchOutcome batch_step(const HybridDb& db, RuntimeId s0, std::span<const std::uint8_t> bytes,
                        const EngineOptions& options) {
  if (!db.has_region() || !db.in_region(s0)) throw Error("batch_step needs an in-region start state");
  if (bytes.size() != db.params().batch) {
    throw Error("batch_step needs exactly " + std::to_string(db.params().batch) + " bytes");
  }
  const auto& k = kernel_for(options.backend.value_or(default_backend()));
  detail::KernelBatch r = k.batch(view_of(db, options.use_gutter), s0, bytes.data());
  BatchOutcome out;
  if (r.completed) {
    out.kind = BatchOutcome::Kind::Completed;
    out.final_state = r.final_state;
  } else {
    out.kind = BatchOutcome::Kind::Escaped;
    out.escape_index = r.escape_index;
    out.replay_state = r.replay_state;
  }
  return out;
}

std::optional<std::uint32_t> find_earliest_escape(std::span<const std::uint8_t> states, int limit) noexcept {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (static_cast<int>(states[i]) > limit) return static_cast<std::uint32_t>(i + 1);
  return std::nullopt;
}

std::optional<std::uint32_t> find_earliest_escape_packed(std::span<const std::uint8_t> states, int limit) noexcept {
  if (limit < 0) return states.empty() ? std::nullopt : std::optional<std::uint32_t>(1);
  if (limit >= 255) return std::nullopt;
  std::uint32_t base = 0;
  while (base < states.size()) {
    auto count = static_cast<std::uint32_t>(std::min<std::size_t>(8, states.size() - base));
    std::uint32_t j = limit <= 127 ? detail::packed_escape(states.data() + base, count, limit)
                                   : detail::linear_escape(states.data() + base, count, limit);
    if (j != 0) return base + j;
    base += count;
  }
  return std::nullopt;
}

StreamState hybrid_scan(const HybridDb& db, StreamState state, std::span<const std::uint8_t> input,
                        const MatchSink& emit, const EngineOptions& options) {
  const auto& k = kernel_for(options.backend.value_or(default_backend()));
  RuntimeId s = k.hybrid(view_of(db, options.use_gutter), state.state, input.data(), input.size(), state.consumed,
                         emit_trampoline, const_cast<MatchSink*>(&emit));
  return {s, state.consumed + input.size()};
}

StreamState scan_stream(const HybridDb& db, StreamState prior, std::span<const std::uint8_t> chunk,
                        const MatchSink& emit, EngineKind engine, const EngineOptions& options) {
  if (!db.is_live(prior.state)) {
    throw StreamMismatch("stream state " + std::to_string(prior.state) + " is not valid for this database");
  }
  if (engine == EngineKind::Scalar) return scalar_scan(db, prior, chunk, emit);
  return hybrid_scan(db, prior, chunk, emit, options);
}

std::vector<MatchEvent> collect_matches(const HybridDb& db, std::span<const std::uint8_t> input, EngineKind engine,
                                        const EngineOptions& options) {
  std::vector<MatchEvent> events;
  scan_stream(db, initial_state(db), input, [&](const MatchEvent& e) { events.push_back(e); }, engine, options);
  return events;
}

}  // namespace hdfa
