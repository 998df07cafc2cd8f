#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace confound {

/// Column-major table of unparsed cells.
struct RawTable {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> columns;

  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  std::optional<std::size_t> index_of(std::string_view name) const noexcept;
  const std::vector<std::string>& column(std::string_view name) const;
};

/// Reads a delimited file whose first non-comment line holds the headers.
/// Lines starting with '#' before the header are skipped. When `keep` is
/// given, only those columns are stored (a missing one is an error).
/// Throws ParseError on ragged rows or duplicate headers.
RawTable read_delimited(std::istream& in, char delimiter = '\t',
                        const std::vector<std::string>* keep = nullptr);
RawTable load_delimited(const std::string& path, char delimiter = '\t',
                        const std::vector<std::string>* keep = nullptr);

}  // namespace confound
