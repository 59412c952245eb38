#include <cstring>

#include "scan_kernel.hpp"

namespace hdfa::detail {

namespace {

struct PortableLanes {
  struct Vec {
    std::uint8_t b[64];
  };
  static Vec load(const std::uint8_t* p) noexcept {
    Vec v;
    std::memcpy(v.b, p, 64);
    return v;
  }
  static Vec permute(const Vec& table, const Vec& idx) noexcept {
    Vec out;
    for (int i = 0; i < 64; ++i) out.b[i] = table.b[idx.b[i] & 63];
    return out;
  }
  static std::uint32_t lane(const Vec& v, std::uint32_t s) noexcept { return v.b[s & 63]; }
};

void permute_portable(const std::uint8_t* table, const std::uint8_t* idx, std::uint8_t* out) {
  for (int i = 0; i < 64; ++i) out[i] = table[idx[i] & 63];
}

}  // namespace

KernelOps portable_kernel() noexcept {
  return {permute_portable, batch_impl<PortableLanes>, hybrid_impl<PortableLanes>};
}

}  // namespace hdfa::detail
