#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace confound {

/// Rewrites raw codes in [low, high] (inclusive) to `target`.
struct MappingRule {
  std::int64_t low = 0;
  std::int64_t high = 0;
  std::int64_t target = 0;

  bool covers(std::int64_t v) const noexcept { return v >= low && v <= high; }
  friend bool operator==(const MappingRule&, const MappingRule&) = default;
};

enum class OverlapPolicy {
  kReject,      ///< overlapping sources are a parse error
  kFirstMatch,  ///< later overlapping rules are kept but shadowed where the earlier one matches
};

/// Parses "src:dst" / "lo-hi:dst" tokens separated by commas, e.g.
/// "2:0, 85-97:0". Empty text yields no rules. Negative codes are written
/// with a leading minus ("-9:0", "-9--1:0").
///
/// Throws ParseError whose column is the 1-based character offset of the
/// offending token.
std::vector<MappingRule> parse_mapping_rule(std::string_view text, OverlapPolicy policy = OverlapPolicy::kReject);

/// Canonical text form: "a:b" or "lo-hi:b" joined by ", ".
std::string format_rules(const std::vector<MappingRule>& rules);

/// First matching rule wins; unmatched values pass through.
std::int64_t apply_rules(const std::vector<MappingRule>& rules, std::int64_t value) noexcept;

/// True when a second pass of `rules` can never change a mapped value.
bool is_idempotent(const std::vector<MappingRule>& rules);

enum class ColumnKind { kOrdinal, kCategorical };

std::string_view to_string(ColumnKind kind) noexcept;

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kOrdinal;
  std::vector<MappingRule> rules;
  /// CAT only: when set, mapped codes must lie in [0, category_count).
  std::optional<std::int64_t> category_count;
};

struct MappingSpec {
  std::vector<ColumnSpec> columns;
  std::vector<std::string> warnings;

  const ColumnSpec* find(std::string_view name) const noexcept;
};

/// One column per line: `NAME KIND rules...`, KIND is ORD or CAT, rules as in
/// parse_mapping_rule. Blank lines, lines starting with '#', and an optional
/// `Column Type Mappings` header line are skipped. Overlapping sources are
/// accepted with first-match semantics and reported in `warnings`.
MappingSpec parse_mapping_spec(std::istream& in);
MappingSpec load_mapping_spec(const std::string& path);

}  // namespace confound
