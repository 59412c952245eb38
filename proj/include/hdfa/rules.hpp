#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hdfa {

/// Patterns read from a rule file, one regex per line. Blank lines and lines
/// starting with '#' are skipped; the pattern id is the index among the
/// remaining lines.
struct RuleSet {
  std::vector<std::string> patterns;
  std::vector<std::size_t> line_numbers;  // 1-based, parallel to patterns
};

RuleSet parse_rules(std::string_view text);

/// Throws IoError when the file cannot be read.
RuleSet load_rules(const std::filesystem::path& path);

}  // namespace hdfa
