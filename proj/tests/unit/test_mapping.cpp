#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "confound/errors.hpp"
#include "confound/mapping.hpp"

using namespace confound;

namespace {

std::vector<std::int64_t> map_all(const std::vector<MappingRule>& rules, std::vector<std::int64_t> v) {
  for (auto& x : v) x = apply_rules(rules, x);
  return v;
}

// Random non-overlapping rule sets over [-50, 1000].
std::vector<MappingRule> random_rules(std::mt19937_64& gen, bool targets_outside_sources) {
  std::uniform_int_distribution<int> count(0, 6), width(0, 40), gap(1, 60), target(-20, 20);
  std::vector<MappingRule> rules;
  std::int64_t cursor = -50 + gap(gen);
  const int n = count(gen);
  for (int i = 0; i < n && cursor < 1000; ++i) {
    MappingRule r;
    r.low = cursor;
    r.high = cursor + width(gen);
    r.target = target(gen);
    rules.push_back(r);
    cursor = r.high + gap(gen);
  }
  std::shuffle(rules.begin(), rules.end(), gen);
  if (targets_outside_sources) {
    for (auto& r : rules) {
      while (std::any_of(rules.begin(), rules.end(), [&](const MappingRule& o) { return o.covers(r.target); })) {
        r.target = 2000 + target(gen);
      }
    }
  }
  return rules;
}

}  // namespace

TEST_CASE("parse_mapping_rule examples") {
  const auto alcever = parse_mapping_rule("2:0, 85-97:0");
  REQUIRE(alcever.size() == 2);
  CHECK(alcever[0] == MappingRule{2, 2, 0});
  CHECK(alcever[1] == MappingRule{85, 97, 0});

  CHECK(parse_mapping_rule("").empty());
  CHECK(parse_mapping_rule("   ").empty());

  const auto alctry = parse_mapping_rule("985-998:80");
  REQUIRE(alctry.size() == 1);
  CHECK(alctry[0] == MappingRule{985, 998, 80});

  const auto negative = parse_mapping_rule("-9:0, -7--3:1");
  REQUIRE(negative.size() == 2);
  CHECK(negative[0] == MappingRule{-9, -9, 0});
  CHECK(negative[1] == MappingRule{-7, -3, 1});
}

TEST_CASE("parse_mapping_rule errors carry the token position") {
  auto column_of = [](std::string_view text) -> std::size_t {
    try {
      parse_mapping_rule(text);
    } catch (const ParseError& e) {
      return e.column();
    }
    return 0;
  };
  CHECK(column_of("2:0, x:1") == 6);
  CHECK(column_of("2:0, 7-3:1") == 6);
  CHECK(column_of("1-5:0, 3:1") == 8);
  CHECK(column_of("2:0,,3:1") == 5);
  CHECK(column_of("2:0, 3:") == 6);
  CHECK(column_of("2") == 1);
  CHECK(column_of("2:3:4") == 1);
  CHECK(column_of("2:0,") == 5);

  CHECK_THROWS_AS(parse_mapping_rule("3:0, 2:1, 3:2"), ParseError);
  const auto shadowed = parse_mapping_rule("3:0, 2:1, 3:2", OverlapPolicy::kFirstMatch);
  CHECK(shadowed.size() == 3);
  CHECK(apply_rules(shadowed, 3) == 0);
}

TEST_CASE("apply_rules on survey codes") {
  const auto alcever = parse_mapping_rule("2:0, 85-97:0");
  CHECK(map_all(alcever, {1, 2, 94, 97}) == std::vector<std::int64_t>{1, 0, 0, 0});
  CHECK(map_all(alcever, {1, 2, 85, 94, 97}) == std::vector<std::int64_t>{1, 0, 0, 0, 0});
  CHECK(map_all({}, {5, 6, 7}) == std::vector<std::int64_t>{5, 6, 7});
  CHECK(map_all(parse_mapping_rule("1:0, 2:1"), {1, 2}) == std::vector<std::int64_t>{0, 1});
}

TEST_CASE("idempotence when targets are fixed points") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::int64_t> value(-60, 1100);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rules = random_rules(gen, true);
    CHECK(is_idempotent(rules));
    for (int i = 0; i < 50; ++i) {
      const auto v = value(gen);
      CHECK(apply_rules(rules, apply_rules(rules, v)) == apply_rules(rules, v));
    }
  }
  CHECK(is_idempotent(parse_mapping_rule("2:0, 85-97:0")));
  // 85 -> 1 -> 0 on a second pass.
  CHECK_FALSE(is_idempotent(parse_mapping_rule("1-2:0, 85-99:1, 3-4:2")));
}

TEST_CASE("format/parse round trip is canonical") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rules = random_rules(gen, false);
    const std::string text = format_rules(rules);
    CHECK(parse_mapping_rule(text) == rules);
    CHECK(format_rules(parse_mapping_rule(text)) == text);
  }
  CHECK(format_rules(parse_mapping_rule("  2:0,85 - 97 : 0 ")) == "2:0, 85-97:0");
}

TEST_CASE("full survey mapping table parses") {
  const auto spec = load_mapping_spec(CONFOUND_FIXTURE_DIR "/survey_mapping.txt");
  CHECK(spec.columns.size() == 79);
  REQUIRE(spec.warnings.size() == 1);
  CHECK(spec.warnings[0].find("COUTYP4") != std::string::npos);

  const auto* alcever = spec.find("ALCEVER");
  REQUIRE(alcever != nullptr);
  CHECK(alcever->kind == ColumnKind::kOrdinal);
  CHECK(map_all(alcever->rules, {1, 2, 85, 94, 97}) == std::vector<std::int64_t>{1, 0, 0, 0, 0});

  const auto* race = spec.find("NEWRACE2");
  REQUIRE(race != nullptr);
  CHECK(race->kind == ColumnKind::kCategorical);
  CHECK(race->rules.size() == 4);
  CHECK(spec.find("IRKI17_2") != nullptr);
  CHECK(spec.find("IRKI17_2")->rules.empty());
  CHECK(spec.find("NOPE") == nullptr);
}

TEST_CASE("mapping spec file errors report line and column") {
  auto error_of = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    std::istringstream in(text);
    try {
      parse_mapping_spec(in);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  CHECK(error_of("A ORD 1:0\nB XYZ 1:0\n") == std::pair<std::size_t, std::size_t>{2, 3});
  CHECK(error_of("A ORD 1:0\n\n# comment\nB ORD 1:0, x:2\n") == std::pair<std::size_t, std::size_t>{4, 12});
  CHECK(error_of("LONELY\n") == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(error_of("A ORD\nA CAT\n").first == 2);

  std::istringstream header("Column Type Mappings\nA CAT 1:0\n");
  CHECK(parse_mapping_spec(header).columns.size() == 1);
  CHECK_THROWS_AS(load_mapping_spec("/nonexistent/mapping.txt"), IoError);
}
