#include "hdfa/workload.hpp"

#include <algorithm>
#include <array>

namespace hdfa {

namespace {

constexpr char kWordChars[] = "abcdefghijklmnopqrstuvwxyz0123456789_-/";

std::string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  std::size_t len = min_len + rng() % (max_len - min_len + 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w.push_back(kWordChars[rng() % (sizeof kWordChars - 1)]);
  return w;
}

}  // namespace

std::vector<std::string> synthetic_ruleset(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> rules;
  rules.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned kind = static_cast<unsigned>(rng() % 20);
    std::string p;
    if (kind < 12) {
      p = random_word(rng, 4, 10);
    } else if (kind < 15) {
      p = random_word(rng, 3, 6) + "[0-9]{1,3}" + random_word(rng, 1, 3);
    } else if (kind < 17) {
      p = "(" + random_word(rng, 2, 4) + "|" + random_word(rng, 2, 4) + ")" + random_word(rng, 2, 4);
    } else if (kind < 19) {
      p = random_word(rng, 2, 4) + "." + random_word(rng, 2, 4);
    } else {
      p = random_word(rng, 2, 3) + "[^\\n]{0,3}" + random_word(rng, 2, 3);
    }
    rules.push_back(std::move(p));
  }
  return rules;
}

std::vector<std::uint8_t> region_circulating_input(const HybridDb& db, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> out(length);
  if (!db.has_region()) {
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
  }
  // Per region state, the bytes that keep the walk inside.
  std::vector<std::vector<std::uint8_t>> stay(db.region_size());
  for (std::size_t b = 0; b < kAlphabetSize; ++b)
    for (std::uint32_t s = 0; s < db.region_size(); ++s)
      if (db.gutter()[b][s] != kGutterState) stay[s].push_back(static_cast<std::uint8_t>(b));

  RuntimeId state = db.start();
  for (auto& b : out) {
    if (db.in_region(state) && !stay[state].empty()) {
      b = stay[state][rng() % stay[state].size()];
    } else {
      b = static_cast<std::uint8_t>(rng());
    }
    state = scalar_step(db, state, b);
  }
  return out;
}

std::vector<std::uint8_t> region_progress_bytes(const HybridDb& db) {
  std::vector<std::uint8_t> out;
  if (!db.has_region()) return out;
  ByteSet picked;
  for (RuntimeId s = 0; s < db.region_size(); ++s) {
    std::vector<std::pair<RuntimeId, int>> counts;
    for (std::size_t b = 0; b < kAlphabetSize; ++b) {
      RuntimeId t = db.outer().next(s, static_cast<std::uint8_t>(b));
      auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == t; });
      if (it == counts.end()) counts.emplace_back(t, 1);
      else ++it->second;
    }
    RuntimeId common = std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
                         return a.second < b.second;
                       })->first;
    for (std::size_t b = 0; b < kAlphabetSize; ++b)
      if (db.outer().next(s, static_cast<std::uint8_t>(b)) != common) picked.set(b);
  }
  for (std::size_t b = 0; b < kAlphabetSize; ++b)
    if (picked.test(b)) out.push_back(static_cast<std::uint8_t>(b));
  return out;
}

CaseGenerator::CaseGenerator(const HybridDb& db, std::uint64_t seed, double mean_length)
    : rng_(seed), biased_(region_progress_bytes(db)), mean_length_(mean_length) {}

std::vector<std::uint8_t> CaseGenerator::next() {
  std::geometric_distribution<std::size_t> length_dist(1.0 / (mean_length_ + 1.0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t len = length_dist(rng_);
  const double bias = biased_.empty() ? 0.0 : unit(rng_);
  std::vector<std::uint8_t> input(len);
  for (auto& b : input) {
    if (unit(rng_) < bias) b = biased_[rng_() % biased_.size()];
    else b = static_cast<std::uint8_t>(rng_());
  }
  return input;
}

ScanResult run_engine(const HybridDb& db, std::span<const std::uint8_t> input, EngineKind engine,
                      const EngineOptions& options) {
  ScanResult r;
  r.final_state = scan_stream(db, initial_state(db), input, [&](const MatchEvent& e) { r.events.push_back(e); },
                              engine, options);
  return r;
}

namespace {

bool diverges(const HybridDb& db, std::span<const std::uint8_t> input, const EngineOptions& options) {
  return run_engine(db, input, EngineKind::Hybrid, options) != run_engine(db, input, EngineKind::Scalar);
}

}  // namespace

namespace {

// Shortest prefix that still diverges. Divergence is not monotone in the
// prefix length (batch alignment matters), so the binary search only
// narrows the range; the answer is verified before it is used.
std::size_t shortest_prefix(const HybridDb& db, std::span<const std::uint8_t> input, const EngineOptions& options) {
  std::size_t lo = 0, hi = input.size();
  while (lo + 1 < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (diverges(db, input.first(mid), options)) hi = mid;
    else lo = mid;
  }
  return diverges(db, input.first(hi), options) ? hi : input.size();
}

}  // namespace

std::vector<std::uint8_t> shrink_divergence(const HybridDb& db, std::vector<std::uint8_t> input,
                                            const EngineOptions& options) {
  if (!diverges(db, input, options)) return input;
  input.resize(shortest_prefix(db, input, options));
  // Latest start offset that still diverges, found by a linear sweep.
  for (std::size_t start = input.size(); start-- > 1;) {
    if (diverges(db, std::span<const std::uint8_t>(input).subspan(start), options)) {
      input.erase(input.begin(), input.begin() + static_cast<std::ptrdiff_t>(start));
      break;
    }
  }
  input.resize(shortest_prefix(db, input, options));
  return input;
}

DifftestResult run_difftest(const HybridDb& db, const DifftestConfig& config) {
  DifftestResult result;
  CaseGenerator gen(db, config.seed, config.mean_length);
  for (std::size_t i = 0; i < config.cases; ++i) {
    std::vector<std::uint8_t> input = gen.next();
    ++result.cases_run;
    result.bytes_scanned += input.size();
    ScanResult hybrid = run_engine(db, input, EngineKind::Hybrid, config.options);
    ScanResult scalar = run_engine(db, input, EngineKind::Scalar);
    if (hybrid == scalar) continue;
    Divergence d;
    d.case_index = i;
    d.original_length = input.size();
    d.input = shrink_divergence(db, std::move(input), config.options);
    d.hybrid = run_engine(db, d.input, EngineKind::Hybrid, config.options);
    d.scalar = run_engine(db, d.input, EngineKind::Scalar);
    result.divergence = std::move(d);
    break;
  }
  return result;
}

}  // namespace hdfa
