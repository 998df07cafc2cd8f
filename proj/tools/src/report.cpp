#include "report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "confound/errors.hpp"
#include "confound/version.hpp"

namespace confound::cli {

namespace {

constexpr std::string_view kMetaPrefix = "# meta ";

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const { return quote_csv(s); }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::json json_cell(const Cell& c) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(bool b) const { return b; }
    nlohmann::json operator()(std::int64_t i) const { return i; }
    nlohmann::json operator()(double d) const { return std::isfinite(d) ? nlohmann::json(d) : nlohmann::json(nullptr); }
    nlohmann::json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw DomainError("unknown output format '" + name + "'");
}

std::string to_string(Format f) { return f == Format::kCsv ? "csv" : "json"; }

nlohmann::json make_meta(const std::string& command, const nlohmann::json& config) {
  return {{"tool", "confound"}, {"version", kVersion}, {"command", command}, {"config", config}};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string csv_preamble(const nlohmann::json& meta) {
  std::string out = "# confound " + meta.at("version").get<std::string>() + "\n";
  out += std::string(kMetaPrefix) + meta.dump() + "\n";
  return out;
}

std::string render(const Table& table, const nlohmann::json& meta, Format format) {
  if (format == Format::kJson) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t j = 0; j < table.columns.size(); ++j) obj[table.columns[j]] = json_cell(row[j]);
      rows.push_back(std::move(obj));
    }
    nlohmann::json doc;
    doc["meta"] = meta;
    doc["columns"] = table.columns;
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
  }
  std::string out = csv_preamble(meta);
  for (std::size_t j = 0; j < table.columns.size(); ++j) out += (j ? "," : "") + table.columns[j];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + csv_cell(row[j]);
    out += '\n';
  }
  return out;
}

nlohmann::json read_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '{') {
      const auto doc = nlohmann::json::parse(text);
      if (!doc.contains("meta")) throw ParseError("no embedded metadata in " + path, 0, 0);
      return doc.at("meta");
    }
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line) && !line.empty() && line.front() == '#') {
      if (line.rfind(kMetaPrefix, 0) == 0) return nlohmann::json::parse(line.substr(kMetaPrefix.size()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad embedded metadata: ") + e.what(), 0, 0);
  }
  throw ParseError("no embedded metadata in " + path, 0, 0);
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  f.flush();
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace confound::cli
