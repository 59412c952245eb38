// Built with -mavx512f -mavx512bw -mavx512vbmi; only reached after a
// runtime CPU check.
#include <immintrin.h>

#include "scan_kernel.hpp"

namespace hdfa::detail {

namespace {

struct Avx512Lanes {
  using Vec = __m512i;
  static Vec load(const std::uint8_t* p) noexcept { return _mm512_loadu_si512(p); }
  // VPERMB indexes with the low six bits of every idx byte.
  static Vec permute(Vec table, Vec idx) noexcept { return _mm512_permutexvar_epi8(idx, table); }
  static std::uint32_t lane(Vec v, std::uint32_t s) noexcept {
    __m512i picked = _mm512_permutexvar_epi8(_mm512_set1_epi8(static_cast<char>(s)), v);
    return static_cast<std::uint32_t>(_mm_cvtsi128_si32(_mm512_castsi512_si128(picked))) & 0xffu;
  }
};

void permute_avx512(const std::uint8_t* table, const std::uint8_t* idx, std::uint8_t* out) {
  _mm512_storeu_si512(out, Avx512Lanes::permute(_mm512_loadu_si512(table), _mm512_loadu_si512(idx)));
}

}  // namespace

KernelOps avx512_kernel() noexcept {
  return {permute_avx512, batch_impl<Avx512Lanes>, hybrid_impl<Avx512Lanes>};
}

}  // namespace hdfa::detail
