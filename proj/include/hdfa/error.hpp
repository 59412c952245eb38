#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdfa {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed pattern text. `offset()` is the byte offset of the problem.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed but outside the supported dialect (anchors, backreferences,
/// lookaround, empty-string matches).
class UnsupportedFeature : public Error {
 public:
  UnsupportedFeature(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A configured size limit (NFA states, DFA states, region capacity) was hit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

struct PatternDiagnostic {
  std::size_t pattern_index;
  std::size_t offset;
  std::string message;
};

/// Aggregated per-pattern failures from compiling a pattern set.
class CompileError : public Error {
 public:
  explicit CompileError(std::vector<PatternDiagnostic> diagnostics);
  const std::vector<PatternDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<PatternDiagnostic> diagnostics_;
};

enum class DbErrorKind { BadMagic, UnsupportedVersion, Truncated, InvariantViolation };

const char* to_string(DbErrorKind kind) noexcept;

class DatabaseError : public Error {
 public:
  DatabaseError(DbErrorKind kind, const std::string& detail)
      : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
  DbErrorKind kind() const noexcept { return kind_; }

 private:
  DbErrorKind kind_;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A stream state that does not belong to the database it is being used with.
class StreamMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace hdfa
