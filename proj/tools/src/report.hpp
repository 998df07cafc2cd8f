#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace confound::cli {

enum class Format { kCsv, kJson };

Format parse_format(const std::string& name);
std::string to_string(Format f);

using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

/// Named columns and rows; rendered as CSV or as JSON objects with the same keys.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Metadata header common to every output: tool, version, command and the
/// resolved configuration needed to regenerate the file.
nlohmann::json make_meta(const std::string& command, const nlohmann::json& config);

/// CSV output starts with '#' lines holding the metadata; JSON output is an
/// object {"meta", "columns", "rows"}.
std::string render(const Table& table, const nlohmann::json& meta, Format format);

/// The '#' lines used at the top of CSV outputs.
std::string csv_preamble(const nlohmann::json& meta);

std::string format_double(double v);

/// Reads the metadata embedded in a file written by this tool.
nlohmann::json read_meta(const std::string& path);

/// Writes to `path`, or to `out` when the path is empty. Throws IoError.
void write_output(const std::string& path, const std::string& text, std::ostream& out);

}  // namespace confound::cli
