#include "hdfa/rules.hpp"

#include <fstream>
#include <sstream>

#include "hdfa/error.hpp"

namespace hdfa {

RuleSet parse_rules(std::string_view text) {
  RuleSet rules;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (line.front() == '#') continue;
    rules.patterns.emplace_back(line);
    rules.line_numbers.push_back(line_no);
  }
  return rules;
}

RuleSet load_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open rule file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read rule file '" + path.string() + "'");
  return parse_rules(buf.str());
}

}  // namespace hdfa
