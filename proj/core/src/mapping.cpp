#include "confound/mapping.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "confound/errors.hpp"

namespace confound {
namespace {

bool is_space(char c) noexcept { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Parses a whole string_view as a signed integer.
std::optional<std::int64_t> to_int(std::string_view s) noexcept {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

MappingRule parse_token(std::string_view token, std::size_t column) {
  const auto colon = token.find(':');
  if (colon == std::string_view::npos || token.find(':', colon + 1) != std::string_view::npos) {
    throw ParseError("expected 'src:dst' or 'lo-hi:dst', got '" + std::string(token) + "'", 0, column);
  }
  const std::string_view source = trim(token.substr(0, colon));
  const auto target = to_int(token.substr(colon + 1));
  if (!target) throw ParseError("invalid target in '" + std::string(token) + "'", 0, column);

  MappingRule rule;
  rule.target = *target;
  // The range dash is the first '-' that is not a sign.
  std::size_t dash = std::string_view::npos;
  for (std::size_t i = 1; i < source.size(); ++i) {
    if (source[i] == '-' && source[i - 1] != '-') {
      dash = i;
      break;
    }
  }
  if (dash == std::string_view::npos) {
    const auto v = to_int(source);
    if (!v) throw ParseError("invalid source in '" + std::string(token) + "'", 0, column);
    rule.low = rule.high = *v;
  } else {
    const auto lo = to_int(source.substr(0, dash));
    const auto hi = to_int(source.substr(dash + 1));
    if (!lo || !hi) throw ParseError("invalid range in '" + std::string(token) + "'", 0, column);
    if (*lo > *hi) throw ParseError("inverted range in '" + std::string(token) + "'", 0, column);
    rule.low = *lo;
    rule.high = *hi;
  }
  return rule;
}

std::string range_text(const MappingRule& r) {
  return r.low == r.high ? std::to_string(r.low) : std::to_string(r.low) + "-" + std::to_string(r.high);
}

}  // namespace

namespace detail {

struct ParsedRules {
  std::vector<MappingRule> rules;
  std::vector<std::string> overlaps;
};

ParsedRules parse_rules(std::string_view text, OverlapPolicy policy) {
  ParsedRules out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view raw = text.substr(start, comma - start);
    const std::string_view token = trim(raw);
    const std::size_t column = start + static_cast<std::size_t>(token.data() - raw.data()) + 1;
    if (token.empty()) {
      if (!trim(text).empty()) throw ParseError("empty rule token", 0, column);
    } else {
      MappingRule rule = parse_token(token, column);
      for (std::size_t i = 0; i < out.rules.size(); ++i) {
        const MappingRule& prev = out.rules[i];
        if (rule.low <= prev.high && prev.low <= rule.high) {
          const std::string msg = "source " + range_text(rule) + " overlaps earlier rule " + range_text(prev) +
                                  ":" + std::to_string(prev.target);
          if (policy == OverlapPolicy::kReject) throw ParseError(msg, 0, column);
          out.overlaps.push_back(msg);
        }
      }
      out.rules.push_back(rule);
    }
    if (comma >= text.size()) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

std::vector<MappingRule> parse_mapping_rule(std::string_view text, OverlapPolicy policy) {
  return detail::parse_rules(text, policy).rules;
}

std::string format_rules(const std::vector<MappingRule>& rules) {
  std::string out;
  for (const auto& r : rules) {
    if (!out.empty()) out += ", ";
    out += range_text(r) + ":" + std::to_string(r.target);
  }
  return out;
}

std::int64_t apply_rules(const std::vector<MappingRule>& rules, std::int64_t value) noexcept {
  for (const auto& r : rules) {
    if (r.covers(value)) return r.target;
  }
  return value;
}

bool is_idempotent(const std::vector<MappingRule>& rules) {
  // A mapped value changes on a second pass only if it is some rule's
  // target and a rule sends it elsewhere. Pass-through values are the
  // values no rule covers, so they stay fixed.
  for (const auto& r : rules) {
    if (apply_rules(rules, r.target) != r.target) return false;
  }
  return true;
}

std::string_view to_string(ColumnKind kind) noexcept {
  return kind == ColumnKind::kCategorical ? "CAT" : "ORD";
}

const ColumnSpec* MappingSpec::find(std::string_view name) const noexcept {
  const auto it = std::find_if(columns.begin(), columns.end(), [&](const ColumnSpec& c) { return c.name == name; });
  return it == columns.end() ? nullptr : &*it;
}

MappingSpec parse_mapping_spec(std::istream& in) {
  MappingSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;

    // NAME and KIND are the first two whitespace-delimited words.
    std::size_t pos = 0;
    auto next_word = [&](std::size_t& word_col) {
      while (pos < line.size() && is_space(line[pos])) ++pos;
      const std::size_t begin = pos;
      while (pos < line.size() && !is_space(line[pos])) ++pos;
      word_col = begin + 1;
      return std::string_view(line).substr(begin, pos - begin);
    };
    std::size_t name_col = 0, kind_col = 0;
    const std::string_view name = next_word(name_col);
    const std::string_view kind = next_word(kind_col);
    if (name == "Column" && kind == "Type") continue;
    if (kind.empty()) throw ParseError("missing column kind (ORD or CAT)", line_no, name_col);

    ColumnSpec col;
    col.name = std::string(name);
    if (kind == "ORD") {
      col.kind = ColumnKind::kOrdinal;
    } else if (kind == "CAT") {
      col.kind = ColumnKind::kCategorical;
    } else {
      throw ParseError("unknown column kind '" + std::string(kind) + "'", line_no, kind_col);
    }
    if (spec.find(col.name)) throw ParseError("duplicate column '" + col.name + "'", line_no, name_col);

    const std::string_view rest = std::string_view(line).substr(pos);
    try {
      auto parsed = detail::parse_rules(rest, OverlapPolicy::kFirstMatch);
      col.rules = std::move(parsed.rules);
      for (auto& w : parsed.overlaps) {
        spec.warnings.push_back("line " + std::to_string(line_no) + " (" + col.name + "): " + w +
                                "; first match wins");
      }
    } catch (const ParseError& e) {
      throw ParseError(e.message(), line_no, pos + e.column());
    }
    spec.columns.push_back(std::move(col));
  }
  return spec;
}

MappingSpec load_mapping_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mapping spec '" + path + "'");
  return parse_mapping_spec(in);
}

}  // namespace confound
