#include "confound/ensemble.hpp"

#include <cmath>
#include <string>

#include "confound/errors.hpp"
#include "confound/parallel.hpp"

namespace confound {
namespace {

void check_formula_args(double p, int k) {
  if (!(p >= 0.5 && p < 1.0)) throw DomainError("p must satisfy 0.5 <= p < 1");
  if (k < 1) throw DomainError("k must be >= 1");
}

}  // namespace

Eigen::VectorXd population_response(const ResponseMatrix& m) {
  const auto col = m.column(0);
  Eigen::VectorXd y(static_cast<Eigen::Index>(m.rows()));
  for (std::size_t i = 0; i < m.rows(); ++i) y[static_cast<Eigen::Index>(i)] = col[i];
  return y;
}

DesignMatrix population_design(const ResponseMatrix& m, bool intercept) {
  const auto n = static_cast<Eigen::Index>(m.rows());
  const auto k = static_cast<Eigen::Index>(m.cols()) - 1;
  Eigen::MatrixXd x(n, k);
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto col = m.column(static_cast<std::size_t>(j + 1));
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = col[static_cast<std::size_t>(i)];
    names.push_back("R" + std::to_string(j + 1));
  }
  return DesignMatrix(x, std::move(names), intercept);
}

ReplicationDigest fit_replication(const ModelParams& params, std::uint32_t index, const EnsembleOptions& opts) {
  ReplicationDigest d;
  d.index = index;
  try {
    const ResponseMatrix m = draw_population(params, params.column_count(), index);
    const Eigen::VectorXd y = population_response(m);
    d.dependent_mean = y.mean();

    const DesignMatrix x = population_design(m, opts.include_intercept);
    const FitResult fit = fit_logistic(y, x, opts.fit);
    d.converged = fit.converged;
    d.separation = fit.separation_detected;
    d.iterations = fit.iterations;

    const Eigen::Index first = x.first_regressor();
    if (params.causal_increment == 0.0) {
      d.beta1 = fit.coefficients.tail(params.k).mean();
      d.sigma1 = fit.std_errors.tail(params.k).mean();
    } else {
      d.beta1 = fit.coefficients[first];
      d.sigma1 = fit.std_errors[first];
    }
  } catch (const Error& e) {
    d.converged = false;
    d.error = e.what();
  }
  return d;
}

EnsembleSummary summarize(const ModelParams& params, std::span<const ReplicationDigest> digests,
                          bool keep_replications) {
  EnsembleSummary s;
  s.params = params;
  s.replications = static_cast<int>(digests.size());
  if (digests.empty()) throw DomainError("replications must be >= 1");

  double sum_beta = 0.0, sum_sigma = 0.0, sum_dep = 0.0;
  int used = 0;
  for (const auto& d : digests) {
    if (!d.converged) continue;
    sum_beta += d.beta1;
    sum_sigma += d.sigma1;
    sum_dep += d.dependent_mean;
    ++used;
  }
  s.excluded = s.replications - used;
  if (used == 0) {
    std::string why = "no replication converged";
    if (!digests.front().error.empty()) why += " (first failure: " + digests.front().error + ")";
    throw NumericalError(why);
  }
  s.mean_beta1 = sum_beta / used;
  s.mean_sigma1 = sum_sigma / used;
  s.mean_dependent = sum_dep / used;

  if (used >= 2) {
    double ss = 0.0;
    for (const auto& d : digests) {
      if (d.converged) ss += (d.beta1 - s.mean_beta1) * (d.beta1 - s.mean_beta1);
    }
    s.mc_error_beta1 = std::sqrt(ss / (used - 1) / used);
  } else {
    // A lone realization: its own sampling error is the only available scale.
    s.mc_error_beta1 = s.mean_sigma1;
  }
  if (keep_replications) s.per_replication.assign(digests.begin(), digests.end());
  return s;
}

EnsembleSummary run_ensemble(const ModelParams& params, int replications, const EnsembleOptions& opts) {
  params.validate();
  if (replications < 1) throw DomainError("replications must be >= 1");
  std::vector<ReplicationDigest> digests(static_cast<std::size_t>(replications));
  parallel_for(digests.size(), opts.threads, [&](std::size_t i) {
    digests[i] = fit_replication(params, static_cast<std::uint32_t>(i), opts);
  });
  return summarize(params, digests, opts.keep_replications);
}

double empirical_beta_formula(double p, int k) {
  check_formula_args(p, k);
  const double b = 2.0 * p - 1.0;
  return 3.0 * b * b / k;
}

double empirical_sigma_formula(double p, int k, double n_respondents) {
  check_formula_args(p, k);
  if (!(n_respondents >= 1.0)) throw DomainError("N must be >= 1");
  const double b = 2.0 * p - 1.0;
  return (4.0 + 12.0 * std::pow(b, 5)) * ((k - (1.0 + b) / 4.0) / k) / std::sqrt(n_respondents);
}

double p_from_correlation(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("correlation must be in [0, 1]");
  return (1.0 + std::sqrt(r)) / 2.0;
}

void GridSpec::validate() const {
  if (correlations.empty() || confounder_counts.empty()) throw DomainError("grid needs at least one r and one n");
  for (double r : correlations) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("every r must lie in (0, 1), got " + std::to_string(r));
  }
  for (int n : confounder_counts) {
    if (n < 1) throw DomainError("every n must be >= 1, got " + std::to_string(n));
  }
  if (n_respondents < 1) throw DomainError("N must be >= 1");
  if (replications < 1) throw DomainError("replications must be >= 1");
  if (!std::isfinite(causal_increment)) throw DomainError("causal increment must be finite");
  if (baseline_prevalence && !(*baseline_prevalence >= 0.0 && *baseline_prevalence < 1.0)) {
    throw DomainError("baseline prevalence must be in [0, 1)");
  }
  if (ci_respondents < 0) throw DomainError("CI population size must be >= 0");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must be in (0, 1)");
}

std::vector<GridRow> scan_grid(const GridSpec& spec, unsigned threads) {
  spec.validate();
  const std::size_t reps = static_cast<std::size_t>(spec.replications);

  std::vector<ModelParams> cells;
  std::vector<GridRow> rows;
  for (double r : spec.correlations) {
    for (int n : spec.confounder_counts) {
      GridRow row;
      row.r = r;
      row.n_confounders = n;
      row.k = n + 1;
      row.p = p_from_correlation(r);
      row.n_respondents = spec.n_respondents;
      row.replications = spec.replications;
      row.predicted_beta1 = empirical_beta_formula(row.p, row.k);
      row.predicted_sigma1 = empirical_sigma_formula(row.p, row.k, static_cast<double>(spec.n_respondents));
      rows.push_back(row);

      ModelParams params;
      params.p = row.p;
      params.k = row.k;
      params.n_respondents = spec.n_respondents;
      params.causal_increment = spec.causal_increment;
      params.seed = spec.seed;
      cells.push_back(params);
    }
  }

  EnsembleOptions opts;
  opts.include_intercept = spec.include_intercept;
  std::vector<ReplicationDigest> digests(cells.size() * reps);
  parallel_for(digests.size(), threads, [&](std::size_t w) {
    const std::size_t cell = w / reps;
    digests[w] = fit_replication(cells[cell], static_cast<std::uint32_t>(w % reps), opts);
  });

  const double scale = std::sqrt(static_cast<double>(spec.n_respondents) /
                                 static_cast<double>(spec.effective_ci_respondents()));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    GridRow& row = rows[c];
    const std::span<const ReplicationDigest> slice(digests.data() + c * reps, reps);
    try {
      const EnsembleSummary s = summarize(cells[c], slice);
      row.excluded = s.excluded;
      row.mean_beta1 = s.mean_beta1;
      row.mean_sigma1 = s.mean_sigma1;
      row.mc_error_beta1 = s.mc_error_beta1;
      row.baseline_prevalence = spec.baseline_prevalence.value_or(s.mean_dependent);
      const Interval ci = confidence_interval(s.mean_beta1, s.mean_sigma1 * scale, spec.level);
      row.relative_risk = relative_risk(s.mean_beta1, row.baseline_prevalence);
      row.ci_low = relative_risk(ci.low, row.baseline_prevalence);
      row.ci_high = relative_risk(ci.high, row.baseline_prevalence);
      row.ok = true;
    } catch (const Error& e) {
      row.excluded = spec.replications;
      row.ok = false;
      row.error = e.what();
    }
  }
  return rows;
}

std::vector<GridRow> scan_grid_causal(const GridSpec& spec, unsigned threads) {
  if (!(spec.causal_increment > 0.0)) throw DomainError("causal scan requires a positive increment");
  return scan_grid(spec, threads);
}

}  // namespace confound
