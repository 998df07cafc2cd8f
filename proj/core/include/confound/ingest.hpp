#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "confound/glm.hpp"
#include "confound/mapping.hpp"
#include "confound/table_io.hpp"

namespace confound {

/// One column of the mapped matrix. CAT sources expand to one column per
/// non-reference category.
struct MappedColumn {
  std::string name;    ///< "SRC" for ORD, "SRC=c" for CAT indicators
  std::string source;  ///< spec column this came from
  ColumnKind kind = ColumnKind::kOrdinal;
  std::optional<std::int64_t> category;
};

struct MappedData {
  Eigen::MatrixXd values;  ///< NaN marks a missing response
  std::vector<MappedColumn> columns;
  std::vector<std::string> sources;  ///< spec order

  Eigen::Index rows() const noexcept { return values.rows(); }
  std::vector<Eigen::Index> columns_of(std::string_view source) const;
  bool has_source(std::string_view source) const noexcept;
};

/// Empty, "NA", "." and "NaN" cells are missing responses.
bool is_missing_cell(std::string_view cell) noexcept;

/// Rewrites every spec column through its rules (first match wins, else
/// pass-through) and one-hot expands CAT columns with the lowest observed
/// code as reference.
///
/// Throws DomainError when a spec column is absent and IngestError for a
/// non-integer cell or a CAT code outside the declared categories.
MappedData apply_mappings(const RawTable& raw, const std::vector<ColumnSpec>& specs);

struct Stage {
  std::string name;
  std::vector<std::string> columns;
};

/// Dependent/independent pair and cumulative confounder stages. Stage i
/// adjusts for the union of stages 0..i.
struct StudySpec {
  std::string dependent;
  std::string independent;
  std::vector<Stage> stages;
  double unit_change = 1.0;  ///< coefficients are reported per this many units of the independent variable
  bool include_intercept = true;
  double level = 0.95;

  /// Throws DomainError on duplicate stage names, a column repeated across
  /// stages, or the dependent/independent appearing among the confounders.
  void validate() const;
  std::size_t stage_index(std::string_view name) const;
};

/// JSON object: {"dependent", "independent", "stages": [{"name", "columns"}],
/// optional "unit_change", "intercept", "level"}. Throws ParseError.
StudySpec parse_study_spec(std::string_view json_text);
StudySpec load_study_spec(const std::string& path);

struct DesignData {
  Eigen::VectorXd y;
  DesignMatrix x;
  Eigen::Index predictor_column = 0;  ///< index of the independent variable in x
  std::size_t dropped_missing_dependent = 0;
  std::size_t dropped_missing_regressor = 0;
};

/// Response vector and design for one cumulative stage: intercept (if
/// requested), independent, then every confounder up to `stage` in
/// declaration order. Rows with a missing dependent or regressor are
/// dropped and counted.
DesignData build_design(const MappedData& data, const StudySpec& study, std::string_view stage);

struct StageResult {
  std::string stage;
  Eigen::Index design_width = 0;
  std::size_t n_used = 0;
  std::size_t dropped = 0;
  int n_confounders = 0;
  double beta1 = 0.0;   ///< per unit_change
  double sigma1 = 0.0;  ///< per unit_change
  double relative_risk = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double baseline_prevalence = 0.0;
  bool converged = false;
  bool separation = false;
  bool ok = false;
  std::string error;
};

/// Fits every cumulative stage. A failing stage is reported in its row and
/// the remaining stages still run.
std::vector<StageResult> staged_analysis(const MappedData& data, const StudySpec& study, double unit_change,
                                         const FitOptions& opts = {});
std::vector<StageResult> staged_analysis(const MappedData& data, const StudySpec& study);

}  // namespace confound
