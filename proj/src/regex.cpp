#include "hdfa/regex.hpp"

#include <cctype>
#include <optional>

#include "hdfa/error.hpp"

namespace hdfa {

SyntaxNode SyntaxNode::literal(std::uint8_t b) {
  SyntaxNode n;
  n.kind = Kind::Literal;
  n.byte = b;
  return n;
}

SyntaxNode SyntaxNode::byte_class(const ByteSet& set) {
  SyntaxNode n;
  n.kind = Kind::Class;
  n.bytes = set;
  return n;
}

SyntaxNode SyntaxNode::concat(std::vector<SyntaxNode> parts) {
  SyntaxNode n;
  n.kind = Kind::Concat;
  n.children = std::move(parts);
  return n;
}

SyntaxNode SyntaxNode::alternation(std::vector<SyntaxNode> branches) {
  SyntaxNode n;
  n.kind = Kind::Alternation;
  n.children = std::move(branches);
  return n;
}

SyntaxNode SyntaxNode::repeat(SyntaxNode body, std::uint32_t min, std::uint32_t max) {
  SyntaxNode n;
  n.kind = Kind::Repeat;
  n.min = min;
  n.max = max;
  n.children.push_back(std::move(body));
  return n;
}

SyntaxNode SyntaxNode::group(SyntaxNode body) {
  SyntaxNode n;
  n.kind = Kind::Group;
  n.children.push_back(std::move(body));
  return n;
}

namespace {

ByteSet range_set(int lo, int hi) {
  ByteSet s;
  for (int b = lo; b <= hi; ++b) s.set(static_cast<std::size_t>(b));
  return s;
}

ByteSet digit_set() { return range_set('0', '9'); }

ByteSet word_set() {
  ByteSet s = range_set('a', 'z') | range_set('A', 'Z') | digit_set();
  s.set('_');
  return s;
}

ByteSet space_set() {
  ByteSet s;
  for (char c : {' ', '\t', '\n', '\r', '\f', '\v'}) s.set(static_cast<unsigned char>(c));
  return s;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SyntaxTree parse() {
    SyntaxNode tree = parse_alternation();
    if (!at_end()) {
      // Only an unmatched ')' can stop the top-level alternation early.
      throw SyntaxError("unmatched ')'", pos_);
    }
    return tree;
  }

 private:
  // An escape resolves either to a single byte or to a class.
  struct Escape {
    std::optional<std::uint8_t> byte;
    ByteSet set;
  };

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  unsigned char peek_byte() const { return static_cast<unsigned char>(text_[pos_]); }

  SyntaxNode parse_alternation() {
    std::vector<SyntaxNode> branches;
    branches.push_back(parse_concat());
    while (!at_end() && peek() == '|') {
      ++pos_;
      branches.push_back(parse_concat());
    }
    if (branches.size() == 1) return std::move(branches.front());
    return SyntaxNode::alternation(std::move(branches));
  }

  SyntaxNode parse_concat() {
    std::vector<SyntaxNode> parts;
    while (!at_end() && peek() != '|' && peek() != ')') {
      parts.push_back(parse_quantified());
    }
    if (parts.empty()) return SyntaxNode::empty();
    if (parts.size() == 1) return std::move(parts.front());
    return SyntaxNode::concat(std::move(parts));
  }

  SyntaxNode parse_quantified() {
    SyntaxNode atom = parse_atom();
    while (!at_end()) {
      char c = peek();
      std::uint32_t lo = 0;
      std::uint32_t hi = 0;
      if (c == '*') {
        lo = 0, hi = kUnbounded;
        ++pos_;
      } else if (c == '+') {
        lo = 1, hi = kUnbounded;
        ++pos_;
      } else if (c == '?') {
        lo = 0, hi = 1;
        ++pos_;
      } else if (c == '{') {
        parse_braces(lo, hi);
      } else {
        break;
      }
      atom = SyntaxNode::repeat(std::move(atom), lo, hi);
    }
    return atom;
  }

  std::uint32_t parse_number() {
    std::size_t start = pos_;
    std::uint64_t value = 0;
    while (!at_end() && std::isdigit(peek_byte())) {
      value = value * 10 + static_cast<std::uint64_t>(peek() - '0');
      if (value > kMaxRepeatBound) throw SyntaxError("repetition bound too large", start);
      ++pos_;
    }
    if (pos_ == start) throw SyntaxError("expected repetition bound", pos_);
    return static_cast<std::uint32_t>(value);
  }

  void parse_braces(std::uint32_t& lo, std::uint32_t& hi) {
    std::size_t open = pos_;
    ++pos_;  // '{'
    lo = parse_number();
    hi = lo;
    if (!at_end() && peek() == ',') {
      ++pos_;
      if (!at_end() && peek() == '}') {
        hi = kUnbounded;
      } else {
        hi = parse_number();
      }
    }
    if (at_end() || peek() != '}') throw SyntaxError("unterminated '{' quantifier", open);
    ++pos_;
    if (hi < lo) throw SyntaxError("repetition bounds out of order", open);
  }

  SyntaxNode parse_atom() {
    std::size_t start = pos_;
    char c = peek();
    switch (c) {
      case '(': {
        ++pos_;
        if (!at_end() && peek() == '?') {
          throw UnsupportedFeature("'(?' groups (lookaround, flags) are not supported", start);
        }
        SyntaxNode body = parse_alternation();
        if (at_end() || peek() != ')') throw SyntaxError("unmatched '('", start);
        ++pos_;
        return SyntaxNode::group(std::move(body));
      }
      case '[':
        return parse_class();
      case '.':
        ++pos_;
        return SyntaxNode::byte_class(ByteSet().set());
      case '^':
      case '$':
        throw UnsupportedFeature(std::string("anchor '") + c + "' is not supported", start);
      case '*':
      case '+':
      case '?':
        throw SyntaxError(std::string("quantifier '") + c + "' without operand", start);
      case '{':
        throw SyntaxError("quantifier '{' without operand", start);
      case '\\': {
        Escape e = parse_escape();
        if (e.byte) return SyntaxNode::literal(*e.byte);
        return SyntaxNode::byte_class(e.set);
      }
      default:
        ++pos_;
        return SyntaxNode::literal(static_cast<std::uint8_t>(c));
    }
  }

  Escape parse_escape() {
    std::size_t start = pos_;
    ++pos_;  // '\'
    if (at_end()) throw SyntaxError("trailing backslash", start);
    char c = peek();
    ++pos_;
    Escape e;
    switch (c) {
      case 'n': e.byte = '\n'; return e;
      case 't': e.byte = '\t'; return e;
      case 'r': e.byte = '\r'; return e;
      case 'f': e.byte = '\f'; return e;
      case 'v': e.byte = '\v'; return e;
      case '0': e.byte = 0; return e;
      case 'd': e.set = digit_set(); return e;
      case 'D': e.set = ~digit_set(); return e;
      case 'w': e.set = word_set(); return e;
      case 'W': e.set = ~word_set(); return e;
      case 's': e.set = space_set(); return e;
      case 'S': e.set = ~space_set(); return e;
      case 'x': {
        if (pos_ + 2 > text_.size()) throw SyntaxError("truncated \\x escape", start);
        int hi = hex_value(text_[pos_]);
        int lo = hex_value(text_[pos_ + 1]);
        if (hi < 0 || lo < 0) throw SyntaxError("invalid \\x escape", start);
        pos_ += 2;
        e.byte = static_cast<std::uint8_t>(hi * 16 + lo);
        return e;
      }
      case 'b': case 'B': case 'A': case 'z': case 'Z': case 'G':
        throw UnsupportedFeature(std::string("assertion '\\") + c + "' is not supported", start);
      default:
        break;
    }
    if (c >= '1' && c <= '9') throw UnsupportedFeature("backreferences are not supported", start);
    auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) throw SyntaxError(std::string("unknown escape '\\") + c + "'", start);
    e.byte = uc;
    return e;
  }

  SyntaxNode parse_class() {
    std::size_t open = pos_;
    ++pos_;  // '['
    bool negate = false;
    if (!at_end() && peek() == '^') {
      negate = true;
      ++pos_;
    }
    ByteSet set;
    bool first = true;
    for (;;) {
      if (at_end()) throw SyntaxError("unterminated '['", open);
      if (peek() == ']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      std::size_t item_pos = pos_;
      Escape lo = parse_class_item();
      bool is_range = lo.byte && pos_ + 1 < text_.size() && peek() == '-' && text_[pos_ + 1] != ']';
      if (!is_range) {
        if (lo.byte) set.set(*lo.byte);
        else set |= lo.set;
        continue;
      }
      ++pos_;  // '-'
      Escape hi = parse_class_item();
      if (!hi.byte) throw SyntaxError("class shorthand as a range endpoint", item_pos);
      if (*hi.byte < *lo.byte) throw SyntaxError("class range out of order", item_pos);
      set |= range_set(*lo.byte, *hi.byte);
    }
    if (negate) set.flip();
    if (set.none()) throw SyntaxError("empty byte class", open);
    return SyntaxNode::byte_class(set);
  }

  Escape parse_class_item() {
    if (peek() == '\\') return parse_escape();
    Escape e;
    e.byte = peek_byte();
    ++pos_;
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void append_byte(std::string& out, std::uint8_t b) {
  static constexpr char kHex[] = "0123456789abcdef";
  if (b >= 0x21 && b < 0x7f && b != ',' && b != '(' && b != ')' && b != '\\') {
    out.push_back(static_cast<char>(b));
  } else {
    out += "\\x";
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 15]);
  }
}

void render(const SyntaxNode& n, std::string& out) {
  using K = SyntaxNode::Kind;
  switch (n.kind) {
    case K::Empty:
      out += "empty";
      return;
    case K::Literal:
      append_byte(out, n.byte);
      return;
    case K::Class: {
      out += "class(";
      std::size_t count = n.bytes.count();
      if (count == 256) {
        out += "any";
      } else if (count > 128) {
        out += "^";
        for (int b = 0; b < 256; ++b)
          if (!n.bytes.test(static_cast<std::size_t>(b))) append_byte(out, static_cast<std::uint8_t>(b));
      } else {
        for (int b = 0; b < 256; ++b)
          if (n.bytes.test(static_cast<std::size_t>(b))) append_byte(out, static_cast<std::uint8_t>(b));
      }
      out += ")";
      return;
    }
    case K::Concat:
    case K::Alternation: {
      out += n.kind == K::Concat ? "concat(" : "alt(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ",";
        render(n.children[i], out);
      }
      out += ")";
      return;
    }
    case K::Repeat:
      out += "rep(";
      render(n.children.front(), out);
      out += "," + std::to_string(n.min) + "..";
      out += n.max == kUnbounded ? std::string("inf") : std::to_string(n.max);
      out += ")";
      return;
    case K::Group:
      out += "group(";
      render(n.children.front(), out);
      out += ")";
      return;
  }
}

}  // namespace

SyntaxTree parse_pattern(std::string_view pattern) { return Parser(pattern).parse(); }

std::string to_string(const SyntaxNode& node) {
  std::string out;
  render(node, out);
  return out;
}

bool matches_empty(const SyntaxNode& n) {
  using K = SyntaxNode::Kind;
  switch (n.kind) {
    case K::Empty:
      return true;
    case K::Literal:
    case K::Class:
      return false;
    case K::Concat:
      for (const auto& c : n.children)
        if (!matches_empty(c)) return false;
      return true;
    case K::Alternation:
      for (const auto& c : n.children)
        if (matches_empty(c)) return true;
      return false;
    case K::Repeat:
      return n.min == 0 || matches_empty(n.children.front());
    case K::Group:
      return matches_empty(n.children.front());
  }
  return false;
}

}  // namespace hdfa
