#pragma once

#include <bitset>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace hdfa {

using ByteSet = std::bitset<256>;

inline constexpr std::uint32_t kUnbounded = std::numeric_limits<std::uint32_t>::max();

/// Largest explicit repetition bound accepted in `{m,n}`.
inline constexpr std::uint32_t kMaxRepeatBound = 10000;

/// Node of a parsed pattern. Byte semantics throughout: no case folding and
/// '.' matches every byte value.
struct SyntaxNode {
  enum class Kind { Empty, Literal, Class, Concat, Alternation, Repeat, Group };

  Kind kind = Kind::Empty;
  std::uint8_t byte = 0;       // Literal
  ByteSet bytes;               // Class, never empty
  std::uint32_t min = 0;       // Repeat
  std::uint32_t max = 0;       // Repeat, kUnbounded for open ranges
  std::vector<SyntaxNode> children;

  static SyntaxNode empty() { return {}; }
  static SyntaxNode literal(std::uint8_t b);
  static SyntaxNode byte_class(const ByteSet& set);
  static SyntaxNode concat(std::vector<SyntaxNode> parts);
  static SyntaxNode alternation(std::vector<SyntaxNode> branches);
  static SyntaxNode repeat(SyntaxNode body, std::uint32_t min, std::uint32_t max);
  static SyntaxNode group(SyntaxNode body);
};

using SyntaxTree = SyntaxNode;

/// Parses one pattern of the supported dialect.
///
/// Supported: literals, '.', bracket classes with ranges and negation, the
/// escapes \\ \. \n \t \r \xHH \d \w \s \D \W \S (also inside classes),
/// escaped punctuation, '|', '(...)' and the quantifiers * + ? {m} {m,n} {m,}.
///
/// Throws SyntaxError for malformed text and UnsupportedFeature for anchors,
/// backreferences, lookaround and other '(?' constructs.
SyntaxTree parse_pattern(std::string_view pattern);

/// Compact structural rendering, e.g. `concat(m,o,d,rep(e,1..inf),l)`.
/// Printable ASCII literals print as themselves, other bytes as `\xHH`.
std::string to_string(const SyntaxNode& node);

/// True when the node's language contains the empty string.
bool matches_empty(const SyntaxNode& node);

}  // namespace hdfa
