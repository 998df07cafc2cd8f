#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace confound {

/// log(p / (1 - p)). Throws DomainError unless 0 < p < 1.
double logit(double p);

/// Logistic function, computed without overflow for any finite input.
double inverse_logit(double x) noexcept;

/// Regressor matrix for a logistic fit, optionally with a leading column of
/// ones. Column names are kept for reporting; the intercept is "(intercept)".
class DesignMatrix {
 public:
  /// `regressors` excludes the intercept; it is prepended when `intercept` is set.
  /// Throws DomainError for a non-intercept all-zero column, a name count
  /// mismatch, or a design with no columns.
  DesignMatrix(const Eigen::MatrixXd& regressors, std::vector<std::string> names, bool intercept);

  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  bool intercept_included() const noexcept { return intercept_; }

  /// Column offset of the first non-intercept regressor.
  Eigen::Index first_regressor() const noexcept { return intercept_ ? 1 : 0; }

  static DesignMatrix intercept_only(Eigen::Index rows);

 private:
  DesignMatrix() = default;

  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
  bool intercept_ = false;
};

struct FitOptions {
  double tol = 1e-8;  ///< convergence on max |coefficient update|
  int max_iter = 100;
  double separation_bound = 30.0;  ///< |beta_j| beyond this flags separation
  double pin_epsilon = 1e-10;
};

struct FitResult {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  bool separation_detected = false;
  std::vector<double> log_likelihood_path;  ///< value after every accepted step, starting at beta = 0
};

/// Maximum-likelihood binary logistic regression by Newton-Raphson (IRLS)
/// with step halving. Standard errors come from the inverse information
/// matrix at the estimate.
///
/// Throws DomainError for non-binary `y`, size mismatch, or N <= m, and
/// SingularDesignError when X lacks full column rank. Separation and the
/// iteration cap are reported through the result flags, not exceptions.
FitResult fit_logistic(const Eigen::VectorXd& y, const DesignMatrix& x, const FitOptions& opts = {});

double log_likelihood(const Eigen::VectorXd& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

/// Gradient of the log-likelihood, X^T (y - p).
Eigen::VectorXd score(const Eigen::VectorXd& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

/// Fractional change in outcome probability for a unit change of the
/// predictor, starting from prevalence `baseline_p` (0 <= p < 1):
/// exp(b) / (1 + (exp(b) - 1) p) - 1.
double relative_risk(double beta1, double baseline_p);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Two-sided standard-normal quantile for a central `level` in (0, 1).
double two_sided_z(double level);

Interval confidence_interval(double estimate, double std_error, double level);

/// Throws NumericalError if the fit did not converge.
Interval confidence_interval(const FitResult& fit, Eigen::Index index, double level);

struct OneHot {
  Eigen::MatrixXd columns;               ///< N x (categories - 1)
  std::vector<std::int64_t> categories;  ///< category of each column, ascending
};

/// Indicator columns for every category except `reference`. Throws
/// DomainError when fewer than two distinct categories are present or the
/// reference does not occur.
OneHot one_hot(std::span<const std::int64_t> values, std::int64_t reference);

}  // namespace confound
