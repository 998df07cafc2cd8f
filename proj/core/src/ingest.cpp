#include "confound/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include "json.hpp"
#include <set>
#include <sstream>

#include "confound/errors.hpp"

namespace confound {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::optional<std::int64_t> parse_code(std::string_view cell) noexcept {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec == std::errc{} && ptr == cell.data() + cell.size()) return v;
  // Integral values written with a trailing ".0" are still integer codes.
  double d = 0.0;
  const auto [dptr, dec] = std::from_chars(cell.data(), cell.data() + cell.size(), d);
  if (dec == std::errc{} && dptr == cell.data() + cell.size() && std::isfinite(d) && d == std::trunc(d) &&
      std::abs(d) < 9.0e15) {
    return static_cast<std::int64_t>(d);
  }
  return std::nullopt;
}

}  // namespace

bool is_missing_cell(std::string_view cell) noexcept {
  while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
  while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
  return cell.empty() || cell == "NA" || cell == "." || cell == "NaN" || cell == "nan";
}

std::vector<Eigen::Index> MappedData::columns_of(std::string_view source) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].source == source) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

bool MappedData::has_source(std::string_view source) const noexcept {
  return std::find(sources.begin(), sources.end(), source) != sources.end();
}

MappedData apply_mappings(const RawTable& raw, const std::vector<ColumnSpec>& specs) {
  const std::size_t n = raw.rows();
  std::vector<Eigen::VectorXd> blocks;
  MappedData out;

  for (const ColumnSpec& spec : specs) {
    const auto idx = raw.index_of(spec.name);
    if (!idx) throw DomainError("mapping spec column '" + spec.name + "' not present in data");
    const auto& cells = raw.columns[*idx];

    std::vector<std::optional<std::int64_t>> mapped(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (is_missing_cell(cells[i])) continue;
      const auto code = parse_code(cells[i]);
      if (!code) throw IngestError("non-integer value '" + cells[i] + "'", i + 1, spec.name);
      mapped[i] = apply_rules(spec.rules, *code);
    }
    out.sources.push_back(spec.name);

    if (spec.kind == ColumnKind::kOrdinal) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = mapped[i] ? static_cast<double>(*mapped[i]) : kMissing;
      blocks.push_back(std::move(v));
      out.columns.push_back({spec.name, spec.name, ColumnKind::kOrdinal, std::nullopt});
      continue;
    }

    std::vector<std::int64_t> present;
    std::vector<std::size_t> present_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (!mapped[i]) continue;
      const std::int64_t c = *mapped[i];
      if (c < 0 || (spec.category_count && c >= *spec.category_count)) {
        throw IngestError("categorical code " + std::to_string(c) + " outside declared categories", i + 1, spec.name);
      }
      present.push_back(c);
      present_rows.push_back(i);
    }
    if (present.empty()) throw IngestError("categorical column has no observed values", 0, spec.name);
    const std::int64_t reference = *std::min_element(present.begin(), present.end());
    OneHot encoded;
    try {
      encoded = one_hot(present, reference);
    } catch (const DomainError& e) {
      throw IngestError(std::string("cannot one-hot encode: ") + e.what(), 0, spec.name);
    }
    for (std::size_t c = 0; c < encoded.categories.size(); ++c) {
      Eigen::VectorXd v = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), kMissing);
      for (std::size_t r = 0; r < present_rows.size(); ++r) {
        v[static_cast<Eigen::Index>(present_rows[r])] = encoded.columns(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
      blocks.push_back(std::move(v));
      out.columns.push_back({spec.name + "=" + std::to_string(encoded.categories[c]), spec.name,
                             ColumnKind::kCategorical, encoded.categories[c]});
    }
  }

  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t j = 0; j < blocks.size(); ++j) out.values.col(static_cast<Eigen::Index>(j)) = blocks[j];
  return out;
}

void StudySpec::validate() const {
  if (dependent.empty()) throw DomainError("study needs a dependent column");
  if (independent.empty()) throw DomainError("study needs an independent column");
  if (dependent == independent) throw DomainError("dependent and independent must differ");
  if (stages.empty()) throw DomainError("study needs at least one stage");
  if (!(unit_change > 0.0) || !std::isfinite(unit_change)) throw DomainError("unit_change must be positive");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must be in (0, 1)");
  std::set<std::string> names, columns;
  for (const Stage& s : stages) {
    if (s.name.empty()) throw DomainError("stage names must be non-empty");
    if (!names.insert(s.name).second) throw DomainError("duplicate stage name '" + s.name + "'");
    for (const auto& c : s.columns) {
      if (c == dependent) throw DomainError("dependent column '" + c + "' listed as a confounder");
      if (c == independent) throw DomainError("independent column '" + c + "' listed as a confounder");
      if (!columns.insert(c).second) throw DomainError("column '" + c + "' appears in more than one stage");
    }
  }
}

std::size_t StudySpec::stage_index(std::string_view name) const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].name == name) return i;
  }
  throw DomainError("no stage named '" + std::string(name) + "'");
}

StudySpec parse_study_spec(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("study spec: ") + e.what(), 0, e.byte);
  }
  StudySpec spec;
  try {
    spec.dependent = j.at("dependent").get<std::string>();
    spec.independent = j.at("independent").get<std::string>();
    for (const auto& s : j.at("stages")) {
      spec.stages.push_back({s.at("name").get<std::string>(), s.at("columns").get<std::vector<std::string>>()});
    }
    spec.unit_change = j.value("unit_change", 1.0);
    spec.include_intercept = j.value("intercept", true);
    spec.level = j.value("level", 0.95);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("study spec: ") + e.what(), 0, 0);
  }
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("study spec: ") + e.what(), 0, 0);
  }
  return spec;
}

StudySpec load_study_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open study spec '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_study_spec(buf.str());
}

DesignData build_design(const MappedData& data, const StudySpec& study, std::string_view stage) {
  study.validate();
  const std::size_t last = study.stage_index(stage);

  auto require = [&](const std::string& source) {
    if (!data.has_source(source)) throw DomainError("column '" + source + "' not present in mapped data");
    return data.columns_of(source);
  };

  const auto dep_cols = require(study.dependent);
  if (dep_cols.size() != 1) throw DomainError("dependent column '" + study.dependent + "' is not binary");
  const auto ind_cols = require(study.independent);
  if (ind_cols.size() != 1 || data.columns[static_cast<std::size_t>(ind_cols.front())].kind != ColumnKind::kOrdinal) {
    throw DomainError("independent column '" + study.independent + "' must be a single ORD column");
  }

  std::vector<Eigen::Index> regressors = ind_cols;
  for (std::size_t s = 0; s <= last; ++s) {
    for (const auto& c : study.stages[s].columns) {
      for (auto idx : require(c)) regressors.push_back(idx);
    }
  }

  const Eigen::Index dep = dep_cols.front();
  std::vector<Eigen::Index> keep;
  std::size_t missing_dep = 0, missing_reg = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double yv = data.values(i, dep);
    if (std::isnan(yv)) {
      ++missing_dep;
      continue;
    }
    if (yv != 0.0 && yv != 1.0) {
      throw DomainError("dependent column '" + study.dependent + "' is not binary after mapping (row " +
                        std::to_string(i + 1) + " has " + std::to_string(yv) + ")");
    }
    const bool any_missing = std::any_of(regressors.begin(), regressors.end(),
                                         [&](Eigen::Index c) { return std::isnan(data.values(i, c)); });
    if (any_missing) {
      ++missing_reg;
      continue;
    }
    keep.push_back(i);
  }

  const auto rows = static_cast<Eigen::Index>(keep.size());
  Eigen::VectorXd y(rows);
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(regressors.size()));
  for (Eigen::Index r = 0; r < rows; ++r) {
    y[r] = data.values(keep[static_cast<std::size_t>(r)], dep);
    for (std::size_t c = 0; c < regressors.size(); ++c) {
      x(r, static_cast<Eigen::Index>(c)) = data.values(keep[static_cast<std::size_t>(r)], regressors[c]);
    }
  }
  std::vector<std::string> names;
  for (auto c : regressors) names.push_back(data.columns[static_cast<std::size_t>(c)].name);

  DesignData out{y, DesignMatrix(x, std::move(names), study.include_intercept), 0, missing_dep, missing_reg};
  out.predictor_column = out.x.first_regressor();
  return out;
}

std::vector<StageResult> staged_analysis(const MappedData& data, const StudySpec& study, double unit_change,
                                         const FitOptions& opts) {
  study.validate();
  if (!(unit_change > 0.0) || !std::isfinite(unit_change)) throw DomainError("unit_change must be positive");

  std::vector<StageResult> results;
  for (const Stage& stage : study.stages) {
    StageResult row;
    row.stage = stage.name;
    try {
      const DesignData d = build_design(data, study, stage.name);
      row.design_width = d.x.cols();
      row.n_used = static_cast<std::size_t>(d.y.size());
      row.dropped = d.dropped_missing_dependent + d.dropped_missing_regressor;
      row.n_confounders = static_cast<int>(d.x.cols() - d.predictor_column - 1);
      row.baseline_prevalence = d.y.size() > 0 ? d.y.mean() : 0.0;

      const FitResult fit = fit_logistic(d.y, d.x, opts);
      row.converged = fit.converged;
      row.separation = fit.separation_detected;
      row.beta1 = fit.coefficients[d.predictor_column] * unit_change;
      row.sigma1 = fit.std_errors[d.predictor_column] * unit_change;
      if (!fit.converged) {
        throw NumericalError(fit.separation_detected ? "separation detected" : "iteration limit reached");
      }
      const Interval ci = confidence_interval(row.beta1, row.sigma1, study.level);
      row.relative_risk = relative_risk(row.beta1, row.baseline_prevalence);
      row.ci_low = relative_risk(ci.low, row.baseline_prevalence);
      row.ci_high = relative_risk(ci.high, row.baseline_prevalence);
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    results.push_back(std::move(row));
  }
  return results;
}

std::vector<StageResult> staged_analysis(const MappedData& data, const StudySpec& study) {
  return staged_analysis(data, study, study.unit_change);
}

}  // namespace confound
