#include "confound/table_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <unordered_map>

#include "confound/errors.hpp"

namespace confound {
namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(delimiter, start);
    std::string cell = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') cell = cell.substr(1, cell.size() - 2);
    out.push_back(std::move(cell));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

std::optional<std::size_t> RawTable::index_of(std::string_view name) const noexcept {
  const auto it = std::find(headers.begin(), headers.end(), name);
  if (it == headers.end()) return std::nullopt;
  return static_cast<std::size_t>(it - headers.begin());
}

const std::vector<std::string>& RawTable::column(std::string_view name) const {
  const auto idx = index_of(name);
  if (!idx) throw DomainError("no column named '" + std::string(name) + "'");
  return columns[*idx];
}

RawTable read_delimited(std::istream& in, char delimiter, const std::vector<std::string>* keep) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> all_headers;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    all_headers = split(line, delimiter);
    break;
  }
  if (all_headers.empty()) throw ParseError("no header row", line_no, 0);

  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < all_headers.size(); ++i) {
    if (!seen.emplace(all_headers[i], i).second) {
      throw ParseError("duplicate header '" + all_headers[i] + "'", line_no, i + 1);
    }
  }

  std::vector<std::size_t> selected;
  if (keep) {
    for (const auto& name : *keep) {
      const auto it = seen.find(name);
      if (it == seen.end()) throw ParseError("required column '" + name + "' not found in header", line_no, 0);
      if (std::find(selected.begin(), selected.end(), it->second) == selected.end()) selected.push_back(it->second);
    }
  } else {
    for (std::size_t i = 0; i < all_headers.size(); ++i) selected.push_back(i);
  }
  for (auto i : selected) table.headers.push_back(all_headers[i]);
  table.columns.resize(selected.size());

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line, delimiter);
    if (cells.size() != all_headers.size()) {
      throw ParseError("expected " + std::to_string(all_headers.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no, 0);
    }
    for (std::size_t c = 0; c < selected.size(); ++c) table.columns[c].push_back(std::move(cells[selected[c]]));
  }
  return table;
}

RawTable load_delimited(const std::string& path, char delimiter, const std::vector<std::string>* keep) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  return read_delimited(in, delimiter, keep);
}

}  // namespace confound
