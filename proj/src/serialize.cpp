// Database file layout (all integers little-endian):
//
//   "HFXD" | u32 version | u8 flags (bit0: region present)
//   u16 k | u16 s_limit (two's complement, 0xFFFF when scalar-only)
//   u32 start | u32 dfa state count
//   u32 accept pair count | count x (u32 runtime id, u32 pattern id)
//   rows x 256 x u32 outer table, row-major
//   [region] 256 x 64 bytes shuffle table, 256 x 64 bytes gutter table
//   u32 batch | u32 sigma | f64 lambda | u32 leak depth
//
// rows = 64 + n - k with a region, n without.

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "hdfa/error.hpp"
#include "hdfa/hybrid_db.hpp"

namespace hdfa {

namespace {

constexpr std::uint8_t kMagic[4] = {'H', 'F', 'X', 'D'};
constexpr std::uint8_t kFlagRegion = 0x01;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) {
      throw DatabaseError(DbErrorKind::Truncated, std::string("payload ends inside ") + what);
    }
  }
  std::span<const std::uint8_t> bytes(std::size_t n, const char* what) {
    need(n, what);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) { return bytes(1, what)[0]; }
  std::uint16_t u16(const char* what) {
    auto b = bytes(2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32(const char* what) {
    auto b = bytes(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
  }
  std::uint64_t u64(const char* what) {
    auto b = bytes(8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

LaneTable read_lanes(Reader& r, const char* what) {
  LaneTable t(kAlphabetSize);
  for (auto& v : t) {
    auto b = r.bytes(kLanes, what);
    std::memcpy(v.lanes.data(), b.data(), kLanes);
  }
  return t;
}

}  // namespace

std::vector<std::uint8_t> serialize(const HybridDb& db) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kFormatVersion);
  w.u8(db.has_region() ? kFlagRegion : 0);
  w.u16(static_cast<std::uint16_t>(db.region_size()));
  w.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(db.s_limit())));
  w.u32(db.start());
  w.u32(db.dfa_states());
  w.u32(static_cast<std::uint32_t>(db.accept_entries().size()));
  for (const AcceptEntry& e : db.accept_entries()) {
    w.u32(e.state);
    w.u32(e.pattern);
  }
  for (RuntimeId id : db.outer().cells()) w.u32(id);
  if (db.has_region()) {
    for (const Vector64& v : db.shuffle()) w.bytes(v.lanes.data(), kLanes);
    for (const Vector64& v : db.gutter()) w.bytes(v.lanes.data(), kLanes);
  }
  const EngineParams& p = db.params();
  w.u32(p.batch);
  w.u32(p.sigma);
  w.f64(p.lambda);
  w.u32(p.leak_depth);
  return w.take();
}

HybridDb deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.bytes(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw DatabaseError(DbErrorKind::BadMagic, "not an .hfxd database");
  std::uint32_t version = r.u32("version");
  if (version != kFormatVersion) {
    throw DatabaseError(DbErrorKind::UnsupportedVersion, "format version " + std::to_string(version));
  }

  HybridDb::Parts parts;
  std::uint8_t flags = r.u8("flags");
  parts.region_size = r.u16("region size");
  auto s_limit = static_cast<std::int16_t>(r.u16("region boundary"));
  parts.start = r.u32("start state");
  parts.dfa_states = r.u32("state count");

  auto invalid = [](const std::string& what) { throw DatabaseError(DbErrorKind::InvariantViolation, what); };
  if (flags & ~kFlagRegion) invalid("unknown flag bits");
  const bool region = flags & kFlagRegion;
  if (region != (parts.region_size > 0)) invalid("region flag disagrees with region size");
  if (s_limit != static_cast<int>(parts.region_size) - 1) invalid("region boundary is not k - 1");
  if (parts.region_size > 63) invalid("region size exceeds 63");
  if (region && parts.region_size > parts.dfa_states) invalid("region larger than automaton");

  std::uint32_t accept_count = r.u32("accept count");
  r.need(static_cast<std::size_t>(accept_count) * 8, "accept map");
  parts.accepts.resize(accept_count);
  for (auto& e : parts.accepts) {
    e.state = r.u32("accept map");
    e.pattern = r.u32("accept map");
  }

  const std::size_t rows = region ? kOuterBase + parts.dfa_states - parts.region_size : parts.dfa_states;
  r.need(rows * kAlphabetSize * 4, "outer table");
  std::vector<RuntimeId> cells(rows * kAlphabetSize);
  for (auto& c : cells) c = r.u32("outer table");
  parts.outer = OuterTable(rows, std::move(cells));

  if (region) {
    parts.shuffle = read_lanes(r, "shuffle table");
    parts.gutter = read_lanes(r, "gutter table");
  }
  parts.params.batch = r.u32("parameters");
  parts.params.sigma = r.u32("parameters");
  parts.params.lambda = r.f64("parameters");
  parts.params.leak_depth = r.u32("parameters");
  if (r.remaining() != 0) invalid("trailing bytes after parameter block");
  return HybridDb(std::move(parts));
}

void save_database(const std::filesystem::path& path, const HybridDb& db) {
  const auto bytes = serialize(db);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

HybridDb load_database(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
  return deserialize(bytes);
}

}  // namespace hdfa
