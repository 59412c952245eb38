// Scan loops shared by the portable and AVX-512 backends.
//
// Each backend translation unit includes this header and instantiates the
// templates with its own lane policy. Everything lives in an anonymous
// namespace and touches only raw pointers, so code built with wider ISA
// flags never leaks into the rest of the library through shared inline
// functions.
#pragma once

#include <cstddef>
#include <cstdint>

namespace hdfa::detail {

struct KernelView {
  const std::uint32_t* outer;   // rows x 256
  const std::uint8_t* lanes;    // 256 x 64, gutter or shuffle table
  int limit;                    // s_limit, -1 when scalar-only
  std::uint32_t batch;          // l
  const std::uint32_t* accept_begin;
  const std::uint32_t* accept_ids;
};

using EmitFn = void (*)(void* ctx, std::uint32_t pattern, std::uint64_t offset);

struct KernelBatch {
  bool completed;
  std::uint32_t final_state;
  std::uint32_t escape_index;
  std::uint32_t replay_state;
};

struct KernelOps {
  void (*permute)(const std::uint8_t* table, const std::uint8_t* idx, std::uint8_t* out);
  KernelBatch (*batch)(const KernelView& view, std::uint32_t s0, const std::uint8_t* bytes);
  std::uint32_t (*hybrid)(const KernelView& view, std::uint32_t state, const std::uint8_t* data, std::size_t n,
                          std::uint64_t base, EmitFn emit, void* ctx);
};

KernelOps portable_kernel() noexcept;
#if defined(HDFA_HAVE_AVX512)
KernelOps avx512_kernel() noexcept;
#endif

namespace {

// 0 when no state exceeds the limit, else the 1-based position of the first
// one. Requires count <= 8 and limit <= 127.
//
// The states are XOR-merged into adjacent bytes of one word. A byte x is
// flagged when x >= limit + 1: its high bit is set either because x itself
// is >= 128, or because ((x & 0x7f) | 0x80) - (limit + 1) stays >= 0x80.
// The per-byte subtraction never borrows across bytes.
inline std::uint32_t packed_escape(const std::uint8_t* states, std::uint32_t count, int limit) noexcept {
  constexpr std::uint64_t kHigh = 0x8080808080808080ull;
  constexpr std::uint64_t kLow7 = 0x7f7f7f7f7f7f7f7full;
  constexpr std::uint64_t kOnes = 0x0101010101010101ull;
  std::uint64_t word = 0;
  for (std::uint32_t i = 0; i < count; ++i) word ^= static_cast<std::uint64_t>(states[i]) << (8 * i);
  const std::uint64_t bound = static_cast<std::uint64_t>(limit + 1) * kOnes;
  const std::uint64_t ge = ((word & kLow7) | kHigh) - bound;
  const std::uint64_t live = count >= 8 ? ~0ull : (1ull << (8 * count)) - 1;
  const std::uint64_t flags = (word | ge) & kHigh & live;
  if (flags == 0) return 0;
  return static_cast<std::uint32_t>(__builtin_ctzll(flags) / 8 + 1);
}

inline std::uint32_t linear_escape(const std::uint8_t* states, std::uint32_t count, int limit) noexcept {
  for (std::uint32_t i = 0; i < count; ++i)
    if (static_cast<int>(states[i]) > limit) return i + 1;
  return 0;
}

inline void emit_accepts(const KernelView& v, std::uint32_t s, std::uint64_t offset, EmitFn emit, void* ctx) {
  for (std::uint32_t i = v.accept_begin[s], e = v.accept_begin[s + 1]; i < e; ++i) emit(ctx, v.accept_ids[i], offset);
}

// Lane policy P provides: Vec, load(const uint8_t*), permute(table, idx)
// with out[i] = table[idx[i] & 63], and lane(vec, s).
template <class P>
inline KernelBatch batch_impl(const KernelView& v, std::uint32_t s0, const std::uint8_t* bytes) {
  const std::uint32_t l = v.batch;
  const std::uint32_t head = l / 2;
  std::uint8_t chain1[32];

  // Chain 1: serial lane lookups.
  std::uint32_t s = s0;
  for (std::uint32_t i = 0; i < head; ++i) {
    s = v.lanes[static_cast<std::size_t>(bytes[i]) * 64 + s];
    chain1[i] = static_cast<std::uint8_t>(s);
  }

  // Chain 2: compose the remaining lane tables; independent of chain 1.
  typename P::Vec d = P::load(v.lanes + static_cast<std::size_t>(bytes[head]) * 64);
  for (std::uint32_t i = head + 1; i < l; ++i) d = P::permute(P::load(v.lanes + static_cast<std::size_t>(bytes[i]) * 64), d);
  const std::uint32_t final_state = P::lane(d, s);

  if (static_cast<int>(s) <= v.limit && static_cast<int>(final_state) <= v.limit) {
    return {true, final_state, 0, 0};
  }
  std::uint32_t j = head <= 8 && v.limit <= 127 ? packed_escape(chain1, head, v.limit) : linear_escape(chain1, head, v.limit);
  if (j == 0) j = head + 1;
  const std::uint32_t replay = j == 1 ? s0 : chain1[j - 2];
  return {false, 0, j, replay};
}

template <class P>
inline std::uint32_t hybrid_impl(const KernelView& v, std::uint32_t state, const std::uint8_t* data, std::size_t n,
                                 std::uint64_t base, EmitFn emit, void* ctx) {
  const std::uint32_t* outer = v.outer;
  const int limit = v.limit;
  const std::size_t l = v.batch;
  std::uint32_t s = state;
  std::size_t pos = 0;
  while (pos < n) {
    if (static_cast<int>(s) <= limit) {
      if (n - pos < l) break;
      KernelBatch r = batch_impl<P>(v, s, data + pos);
      if (r.completed) {
        s = r.final_state;
        pos += l;
        continue;
      }
      // Replay from the last trusted state until the walk leaves the
      // region, at most to the end of this batch.
      const std::size_t end = pos + l;
      pos += r.escape_index - 1;
      s = r.replay_state;
      while (pos < end) {
        s = outer[static_cast<std::size_t>(s) * 256 + data[pos]];
        ++pos;
        emit_accepts(v, s, base + pos, emit, ctx);
        if (static_cast<int>(s) > limit) break;
      }
      continue;
    }
    do {
      s = outer[static_cast<std::size_t>(s) * 256 + data[pos]];
      ++pos;
      emit_accepts(v, s, base + pos, emit, ctx);
    } while (pos < n && static_cast<int>(s) > limit);
  }
  // Tail shorter than one batch.
  for (; pos < n; ++pos) {
    s = outer[static_cast<std::size_t>(s) * 256 + data[pos]];
    emit_accepts(v, s, base + pos + 1, emit, ctx);
  }
  return s;
}

}  // namespace
}  // namespace hdfa::detail
