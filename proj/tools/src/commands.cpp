#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include "confound/errors.hpp"
#include "confound/glm.hpp"
#include "confound/ingest.hpp"
#include "confound/mapping.hpp"
#include "confound/table_io.hpp"

namespace confound::cli {

using nlohmann::json;

namespace {

std::string delimiter_name(char d) { return std::string(1, d); }

char delimiter_from(const json& j, const char* key, char fallback) {
  if (!j.contains(key)) return fallback;
  const auto s = j.at(key).get<std::string>();
  if (s.size() != 1) throw ParseError(std::string("'") + key + "' must be a single character", 0, 0);
  return s.front();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

double pearson_of(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean(), mb = b.mean();
  const Eigen::ArrayXd da = a.array() - ma, db = b.array() - mb;
  const double den = std::sqrt((da * da).sum() * (db * db).sum());
  return den > 0 ? (da * db).sum() / den : std::nan("");
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) throw IngestError("not a number: '" + cell + "'", row, column);
  return v;
}

Table grid_table(const std::vector<GridRow>& rows) {
  Table t;
  t.columns = {"r",           "n_confounders", "N",       "replications",    "mean_beta1",       "mean_sigma1",
               "relative_risk", "ci_low",      "ci_high", "excluded",        "mc_error_beta1",   "predicted_beta1",
               "predicted_sigma1", "baseline_prevalence", "k", "p",           "status"};
  for (const auto& r : rows) {
    const double nan = std::nan("");
    auto val = [&](double v) -> Cell { return r.ok ? Cell{v} : Cell{nan}; };
    t.rows.push_back({r.r, std::int64_t{r.n_confounders}, r.n_respondents, std::int64_t{r.replications},
                      val(r.mean_beta1), val(r.mean_sigma1), val(r.relative_risk), val(r.ci_low), val(r.ci_high),
                      std::int64_t{r.excluded}, val(r.mc_error_beta1), r.predicted_beta1, r.predicted_sigma1,
                      val(r.baseline_prevalence), std::int64_t{r.k}, r.p,
                      r.ok ? std::string("ok") : "failed: " + r.error});
  }
  return t;
}

}  // namespace

char parse_delimiter(const std::string& text) {
  if (text == "tab" || text == "\\t") return '\t';
  if (text == "comma") return ',';
  if (text == "semicolon") return ';';
  if (text == "pipe") return '|';
  if (text.size() == 1 && text != "\n" && text != "\"") return text.front();
  throw DomainError("delimiter must be a single character or tab/comma/semicolon/pipe, got '" + text + "'");
}

std::optional<double> parse_baseline(const std::string& text) {
  if (text == "observed") return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw DomainError("--baseline must be a number in [0, 1) or 'observed', got '" + text + "'");
  return v;
}

// ---- config serialization ----

json to_json(const SimulateConfig& c) {
  return {{"p", c.params.p},
          {"k", c.params.k},
          {"n", c.params.n_respondents},
          {"beta_prime", c.params.causal_increment},
          {"seed", c.params.seed},
          {"realization", c.realization}};
}

json to_json(const ScanConfig& c) {
  const auto& g = c.grid;
  json baseline = g.baseline_prevalence ? json(*g.baseline_prevalence) : json("observed");
  return {{"r_list", g.correlations},
          {"n_list", g.confounder_counts},
          {"N", g.n_respondents},
          {"reps", g.replications},
          {"beta_prime", g.causal_increment},
          {"seed", g.seed},
          {"ci_N", g.effective_ci_respondents()},
          {"baseline", baseline},
          {"intercept", g.include_intercept},
          {"level", g.level},
          {"format", to_string(c.format)}};
}

json to_json(const FitConfig& c) {
  return {{"input", c.input},         {"delimiter", delimiter_name(c.delimiter)},
          {"dependent", c.dependent}, {"regressors", c.regressors},
          {"intercept", c.intercept}, {"level", c.level},
          {"format", to_string(c.format)}};
}

json to_json(const IngestConfig& c) {
  json j = {{"data", c.data},
            {"mapping", c.mapping},
            {"study", c.study},
            {"delimiter", delimiter_name(c.delimiter)},
            {"format", to_string(c.format)}};
  j["unit_change"] = c.unit_change ? json(*c.unit_change) : json(nullptr);
  return j;
}

SimulateConfig simulate_config_from(const json& j) {
  SimulateConfig c;
  c.params.p = j.at("p").get<double>();
  c.params.k = j.at("k").get<int>();
  c.params.n_respondents = j.at("n").get<std::int64_t>();
  c.params.causal_increment = get_or(j, "beta_prime", 0.0);
  c.params.seed = j.at("seed").get<std::uint64_t>();
  c.realization = get_or<std::uint32_t>(j, "realization", 0);
  return c;
}

ScanConfig scan_config_from(const json& j) {
  ScanConfig c;
  auto& g = c.grid;
  g.correlations = j.at("r_list").get<std::vector<double>>();
  g.confounder_counts = j.at("n_list").get<std::vector<int>>();
  g.n_respondents = j.at("N").get<std::int64_t>();
  g.replications = j.at("reps").get<int>();
  g.causal_increment = get_or(j, "beta_prime", 0.0);
  g.seed = j.at("seed").get<std::uint64_t>();
  g.ci_respondents = get_or<std::int64_t>(j, "ci_N", 0);
  const auto& b = j.at("baseline");
  g.baseline_prevalence = b.is_string() ? parse_baseline(b.get<std::string>()) : std::optional<double>(b.get<double>());
  g.include_intercept = get_or(j, "intercept", false);
  g.level = get_or(j, "level", 0.95);
  c.format = parse_format(get_or<std::string>(j, "format", "csv"));
  return c;
}

FitConfig fit_config_from(const json& j) {
  FitConfig c;
  c.input = j.at("input").get<std::string>();
  c.delimiter = delimiter_from(j, "delimiter", ',');
  c.dependent = j.at("dependent").get<std::string>();
  c.regressors = j.at("regressors").get<std::vector<std::string>>();
  c.intercept = get_or(j, "intercept", true);
  c.level = get_or(j, "level", 0.95);
  c.format = parse_format(get_or<std::string>(j, "format", "csv"));
  return c;
}

IngestConfig ingest_config_from(const json& j) {
  IngestConfig c;
  c.data = j.at("data").get<std::string>();
  c.mapping = j.at("mapping").get<std::string>();
  c.study = j.at("study").get<std::string>();
  c.delimiter = delimiter_from(j, "delimiter", '\t');
  if (j.contains("unit_change") && !j.at("unit_change").is_null()) c.unit_change = j.at("unit_change").get<double>();
  c.format = parse_format(get_or<std::string>(j, "format", "csv"));
  return c;
}

// ---- commands ----

Output run_simulate(const SimulateConfig& c) {
  c.params.validate();
  const auto m = draw_population(c.params, c.params.column_count(), c.realization);
  std::ostringstream body;
  write_csv(body, m);
  return {csv_preamble(make_meta("simulate", to_json(c))) + body.str(), kExitOk};
}

Output run_scan(const ScanConfig& c, unsigned threads) {
  c.grid.validate();
  const auto rows = c.grid.causal_increment > 0.0 ? scan_grid_causal(c.grid, threads) : scan_grid(c.grid, threads);
  bool any_ok = false;
  for (const auto& r : rows) any_ok = any_ok || r.ok;
  return {render(grid_table(rows), make_meta("scan", to_json(c)), c.format), any_ok ? kExitOk : kExitNumerical};
}

Output run_fit(const FitConfig& c) {
  if (c.dependent.empty()) throw DomainError("--dependent is required");
  std::vector<std::string> keep{c.dependent};
  std::set<std::string> seen{c.dependent};
  for (const auto& r : c.regressors) {
    if (!seen.insert(r).second) throw DomainError("column '" + r + "' listed twice");
    keep.push_back(r);
  }
  if (c.regressors.empty() && !c.intercept) throw DomainError("no regressors and no intercept");
  if (!(c.level > 0.0 && c.level < 1.0)) throw DomainError("--level must lie in (0, 1)");

  const RawTable raw = load_delimited(c.input, c.delimiter, &keep);
  const std::size_t rows = raw.rows();
  const std::size_t width = keep.size();
  std::vector<std::vector<double>> values(width, std::vector<double>(rows));
  std::vector<bool> usable(rows, true);
  for (std::size_t j = 0; j < width; ++j) {
    const auto& cells = raw.column(keep[j]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (is_missing_cell(cells[i])) {
        usable[i] = false;
        continue;
      }
      values[j][i] = parse_number(cells[i], i + 1, keep[j]);
      if (!std::isfinite(values[j][i])) usable[i] = false;
    }
  }
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < rows; ++i)
    if (usable[i]) used.push_back(i);
  const auto n = static_cast<Eigen::Index>(used.size());
  if (n == 0) throw DomainError("no complete rows in " + c.input);

  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(c.regressors.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = used[static_cast<std::size_t>(i)];
    y[i] = values[0][src];
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = values[static_cast<std::size_t>(j) + 1][src];
  }
  const DesignMatrix design = c.regressors.empty() ? DesignMatrix::intercept_only(n)
                                                   : DesignMatrix(x, c.regressors, c.intercept);
  const FitResult fit = fit_logistic(y, design);
  const double baseline = y.mean();

  Table t;
  t.columns = {"term", "estimate",      "std_error",           "z",  "ci_low",  "ci_high",   "relative_risk",
               "baseline_prevalence", "n", "dropped", "converged", "separation", "iterations", "log_likelihood"};
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    const double b = fit.coefficients[j], se = fit.std_errors[j];
    const auto ci = confidence_interval(b, se, c.level);
    const bool is_intercept = c.intercept && j == 0;
    double rr = std::nan("");
    if (!is_intercept && baseline < 1.0) rr = relative_risk(b, baseline);
    t.rows.push_back({design.names()[static_cast<std::size_t>(j)], b, se, b / se, ci.low, ci.high, rr, baseline,
                      std::int64_t{n}, static_cast<std::int64_t>(rows - used.size()), fit.converged,
                      fit.separation_detected, std::int64_t{fit.iterations}, fit.log_likelihood});
  }
  const int status = fit.converged || fit.separation_detected ? kExitOk : kExitNumerical;
  return {render(t, make_meta("fit", to_json(c)), c.format), status};
}

Output run_ingest(const IngestConfig& c, std::ostream& diagnostics) {
  const MappingSpec mapping = load_mapping_spec(c.mapping);
  for (const auto& w : mapping.warnings) diagnostics << "warning: " << w << '\n';
  const StudySpec study = load_study_spec(c.study);

  std::vector<std::string> needed{study.dependent, study.independent};
  for (const auto& s : study.stages) needed.insert(needed.end(), s.columns.begin(), s.columns.end());
  std::vector<ColumnSpec> specs;
  for (const auto& name : needed) {
    const ColumnSpec* found = mapping.find(name);
    specs.push_back(found ? *found : ColumnSpec{name, ColumnKind::kOrdinal, {}, std::nullopt});
  }
  const RawTable raw = load_delimited(c.data, c.delimiter, &needed);
  const MappedData data = apply_mappings(raw, specs);
  const double unit = c.unit_change.value_or(study.unit_change);
  const auto results = staged_analysis(data, study, unit);

  Table t;
  t.columns = {"stage",        "r",        "n_confounders", "N",          "replications", "mean_beta1",
               "mean_sigma1",  "relative_risk", "ci_low",   "ci_high",    "excluded",     "baseline_prevalence",
               "design_width", "dropped",  "converged",     "separation", "status"};
  bool any_ok = false;
  for (const auto& s : results) {
    any_ok = any_ok || s.ok;
    double r = std::nan("");
    try {
      const auto d = build_design(data, study, s.stage);
      r = pearson_of(d.y, d.x.values().col(d.predictor_column));
    } catch (const Error&) {
    }
    const double nan = std::nan("");
    auto val = [&](double v) -> Cell { return s.ok ? Cell{v} : Cell{nan}; };
    t.rows.push_back({s.stage, r, std::int64_t{s.n_confounders}, static_cast<std::int64_t>(s.n_used),
                      std::int64_t{1}, val(s.beta1), val(s.sigma1), val(s.relative_risk), val(s.ci_low),
                      val(s.ci_high), std::int64_t{s.converged ? 0 : 1}, s.baseline_prevalence,
                      std::int64_t{s.design_width}, static_cast<std::int64_t>(s.dropped), s.converged, s.separation,
                      s.ok ? std::string("ok") : "failed: " + s.error});
  }
  return {render(t, make_meta("ingest", to_json(c)), c.format), any_ok ? kExitOk : kExitNumerical};
}

Output run_replay(const std::string& path, unsigned threads, std::ostream& diagnostics) {
  const json meta = read_meta(path);
  try {
    const auto command = meta.at("command").get<std::string>();
    const auto& config = meta.at("config");
    if (command == "simulate") return run_simulate(simulate_config_from(config));
    if (command == "scan") return run_scan(scan_config_from(config), threads);
    if (command == "fit") return run_fit(fit_config_from(config));
    if (command == "ingest") return run_ingest(ingest_config_from(config), diagnostics);
    throw ParseError("unknown command '" + command + "' in " + path, 0, 0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad embedded config: ") + e.what(), 0, 0);
  }
}

}  // namespace confound::cli
