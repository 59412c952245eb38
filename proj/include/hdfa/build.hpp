#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "hdfa/dfa.hpp"
#include "hdfa/hybrid_db.hpp"
#include "hdfa/region.hpp"

namespace hdfa {

struct BuildOptions {
  CompileConfig compile;
  DetectorConfig detector;
  std::uint32_t batch = 9;

  EngineParams params() const noexcept { return {batch, detector.sigma, detector.lambda, detector.leak_depth}; }
};

struct Build {
  Dfa dfa;
  DetectionReport report;
  HybridDb db;
};

/// Patterns to runtime database in one call: compile, detect, assemble.
Build build_database(std::span<const std::string> patterns, const BuildOptions& options = {});

/// Same for an already compiled automaton.
Build build_database(Dfa dfa, const BuildOptions& options = {});

}  // namespace hdfa
