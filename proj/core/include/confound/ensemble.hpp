#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "confound/glm.hpp"
#include "confound/metamodel.hpp"

namespace confound {

struct EnsembleOptions {
  /// The scaling formulas describe fits on the raw 0/1 regressors with no
  /// constant column, so the ensemble omits the intercept unless asked.
  bool include_intercept = false;
  unsigned threads = 1;
  bool keep_replications = false;
  FitOptions fit{};
};

/// Column 0 of a population as a 0/1 response vector.
Eigen::VectorXd population_response(const ResponseMatrix& m);

/// Columns 1..k of a population as regressors named R1..Rk.
DesignMatrix population_design(const ResponseMatrix& m, bool intercept);

/// Outcome of fitting one realization.
struct ReplicationDigest {
  std::uint32_t index = 0;
  double beta1 = 0.0;   ///< averaged over predictor-role columns when the model is symmetric
  double sigma1 = 0.0;
  double dependent_mean = 0.0;
  int iterations = 0;
  bool converged = false;
  bool separation = false;
  std::string error;  ///< non-empty if the fit threw
};

struct EnsembleSummary {
  ModelParams params;
  int replications = 0;
  int excluded = 0;  ///< non-converged or failed fits, left out of the means
  double mean_beta1 = 0.0;
  double mean_sigma1 = 0.0;
  double mc_error_beta1 = 0.0;  ///< standard error of mean_beta1
  double mean_dependent = 0.0;  ///< average prevalence of column 0
  std::vector<ReplicationDigest> per_replication;
};

/// Draws realization `index` and fits column 0 on columns 1..k.
///
/// With a zero causal increment every regressor is an equivalent choice of
/// predictor, so beta1/sigma1 are the means over all k coefficients of the
/// fit. Otherwise only column 1 is reported.
ReplicationDigest fit_replication(const ModelParams& params, std::uint32_t index, const EnsembleOptions& opts);

/// Reduce digests in index order. Throws NumericalError when no fit converged.
EnsembleSummary summarize(const ModelParams& params, std::span<const ReplicationDigest> digests,
                          bool keep_replications = false);

EnsembleSummary run_ensemble(const ModelParams& params, int replications, const EnsembleOptions& opts = {});

/// 3 b^2 / k with b = 2p - 1. Accepts the boundary p = 0.5.
double empirical_beta_formula(double p, int k);

/// N^{-1/2} (4 + 12 b^5) (k - (1 + b)/4) / k.
double empirical_sigma_formula(double p, int k, double n_respondents);

/// Inverse of r = (2p - 1)^2 on the upper branch: p = (1 + sqrt(r)) / 2.
double p_from_correlation(double r);

struct GridSpec {
  std::vector<double> correlations{0.01, 0.02, 0.05, 0.10, 0.15};
  std::vector<int> confounder_counts{1, 2, 4, 8};  ///< n; the fit uses k = n + 1 regressors
  std::int64_t n_respondents = 10000;
  int replications = 500;
  double causal_increment = 0.0;
  std::uint64_t seed = 0;
  bool include_intercept = false;
  /// Prevalence for the relative-risk conversion. 0 reads the coefficient in
  /// the rare-outcome limit (exp(beta) - 1); nullopt uses the simulated mean
  /// of the dependent column.
  std::optional<double> baseline_prevalence = 0.0;
  /// Population size the confidence intervals are scaled to (0: same as n_respondents).
  std::int64_t ci_respondents = 0;
  double level = 0.95;

  void validate() const;
  std::int64_t effective_ci_respondents() const noexcept {
    return ci_respondents > 0 ? ci_respondents : n_respondents;
  }
};

struct GridRow {
  double r = 0.0;
  int n_confounders = 0;
  int k = 0;
  double p = 0.0;
  std::int64_t n_respondents = 0;
  int replications = 0;
  int excluded = 0;
  double mean_beta1 = 0.0;
  double mean_sigma1 = 0.0;
  double mc_error_beta1 = 0.0;
  double relative_risk = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double baseline_prevalence = 0.0;
  double predicted_beta1 = 0.0;
  double predicted_sigma1 = 0.0;
  bool ok = false;
  std::string error;
};

/// One row per (r, n) cell, r-major. A failing cell is reported in its row
/// and the remaining cells still run. Replications use common random
/// numbers across cells: realization i of every cell comes from the same
/// counter stream under `seed`.
std::vector<GridRow> scan_grid(const GridSpec& spec, unsigned threads = 1);

/// scan_grid with a strictly positive causal increment.
std::vector<GridRow> scan_grid_causal(const GridSpec& spec, unsigned threads = 1);

}  // namespace confound
