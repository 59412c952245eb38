#include "hdfa/build.hpp"

#include "hdfa/error.hpp"

namespace hdfa {

Build build_database(Dfa dfa, const BuildOptions& options) {
  if (options.batch < 1 || options.batch > kMaxBatch) throw Error("batch length must be in 1..64");
  DetectionReport report = detect_with_report(dfa, options.detector);
  HybridDb db = assemble(dfa, report.accepted, options.params());
  return {std::move(dfa), std::move(report), std::move(db)};
}

Build build_database(std::span<const std::string> patterns, const BuildOptions& options) {
  return build_database(compile_pattern_set(patterns, options.compile), options);
}

}  // namespace hdfa
