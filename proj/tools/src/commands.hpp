#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "confound/ensemble.hpp"
#include "confound/metamodel.hpp"
#include "json.hpp"
#include "report.hpp"

namespace confound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Rendered output plus the exit status it implies.
struct Output {
  std::string text;
  int status = kExitOk;
};

struct SimulateConfig {
  ModelParams params;
  std::uint32_t realization = 0;
};

struct ScanConfig {
  GridSpec grid;
  Format format = Format::kCsv;
};

struct FitConfig {
  std::string input;
  char delimiter = ',';
  std::string dependent;
  std::vector<std::string> regressors;
  bool intercept = true;
  double level = 0.95;
  Format format = Format::kCsv;
};

struct IngestConfig {
  std::string data;
  std::string mapping;
  std::string study;
  char delimiter = '\t';
  std::optional<double> unit_change;  ///< overrides the study file when set
  Format format = Format::kCsv;
};

// Serialized configs exclude the output path and the thread count: neither
// changes the content of a result.
nlohmann::json to_json(const SimulateConfig& c);
nlohmann::json to_json(const ScanConfig& c);
nlohmann::json to_json(const FitConfig& c);
nlohmann::json to_json(const IngestConfig& c);

SimulateConfig simulate_config_from(const nlohmann::json& j);
ScanConfig scan_config_from(const nlohmann::json& j);
FitConfig fit_config_from(const nlohmann::json& j);
IngestConfig ingest_config_from(const nlohmann::json& j);

Output run_simulate(const SimulateConfig& c);
Output run_scan(const ScanConfig& c, unsigned threads);
Output run_fit(const FitConfig& c);
Output run_ingest(const IngestConfig& c, std::ostream& diagnostics);

/// Re-runs the command recorded in a file's metadata.
Output run_replay(const std::string& path, unsigned threads, std::ostream& diagnostics);

/// "tab", "comma", "semicolon", "pipe" or a single character.
char parse_delimiter(const std::string& text);

/// A number, or "observed" for the simulated prevalence (nullopt).
std::optional<double> parse_baseline(const std::string& text);

}  // namespace confound::cli
