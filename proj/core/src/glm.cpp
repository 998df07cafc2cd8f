#include "confound/glm.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <set>

#include "confound/errors.hpp"

namespace confound {

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("logit requires 0 < p < 1");
  return std::log(p / (1.0 - p));
}

double inverse_logit(double x) noexcept {
  if (x > 36.0) return 1.0 - std::exp(-x);
  if (x < -36.0) return std::exp(x);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(x)) without overflow.
inline double softplus(double x) noexcept {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

constexpr const char* kInterceptName = "(intercept)";

}  // namespace

DesignMatrix::DesignMatrix(const Eigen::MatrixXd& regressors, std::vector<std::string> names,
                           bool intercept)
    : intercept_(intercept) {
  if (static_cast<Eigen::Index>(names.size()) != regressors.cols()) {
    throw DomainError("design column names do not match column count");
  }
  for (Eigen::Index j = 0; j < regressors.cols(); ++j) {
    if ((regressors.col(j).array() == 0.0).all()) {
      throw DomainError("design column '" + names[j] + "' is all zero");
    }
  }
  const Eigen::Index offset = intercept ? 1 : 0;
  values_.resize(regressors.rows(), regressors.cols() + offset);
  if (intercept) values_.col(0).setOnes();
  values_.rightCols(regressors.cols()) = regressors;
  if (values_.cols() == 0) throw DomainError("design matrix needs at least one column");

  if (intercept) names_.emplace_back(kInterceptName);
  for (auto& n : names) names_.push_back(std::move(n));
}

DesignMatrix DesignMatrix::intercept_only(Eigen::Index rows) {
  DesignMatrix d;
  d.values_ = Eigen::MatrixXd::Ones(rows, 1);
  d.names_ = {kInterceptName};
  d.intercept_ = true;
  return d;
}

double log_likelihood(const Eigen::VectorXd& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
  return ll;
}

Eigen::VectorXd score(const Eigen::VectorXd& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
  const Eigen::VectorXd eta = x * beta;
  const Eigen::VectorXd mu = eta.unaryExpr([](double v) { return inverse_logit(v); });
  return x.transpose() * (y - mu);
}

FitResult fit_logistic(const Eigen::VectorXd& y, const DesignMatrix& design, const FitOptions& opts) {
  const Eigen::MatrixXd& x = design.values();
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  if (y.size() != n) throw DomainError("response length does not match design rows");
  if (n <= m) throw DomainError("need more rows than regressors");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw DomainError("response must be binary (0/1)");
  }

  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < m) {
      throw SingularDesignError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                                " of " + std::to_string(m) + ")");
    }
  }

  FitResult result;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd mu(n);
  Eigen::VectorXd weights(n);
  Eigen::MatrixXd info(m, m);
  double ll = log_likelihood(beta, y, x);
  result.log_likelihood_path.push_back(ll);

  auto refresh = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd eta = x * b;
    for (Eigen::Index i = 0; i < n; ++i) {
      mu[i] = inverse_logit(eta[i]);
      weights[i] = mu[i] * (1.0 - mu[i]);
    }
    info.noalias() = x.transpose() * weights.asDiagonal() * x;
  };

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    refresh(beta);
    const Eigen::VectorXd grad = x.transpose() * (y - mu);
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
      // Weights collapsing to zero means fitted probabilities pinned at 0/1.
      result.separation_detected = true;
      result.iterations = iter - 1;
      break;
    }
    Eigen::VectorXd step = llt.solve(grad);
    Eigen::VectorXd candidate = beta + step;
    double ll_new = log_likelihood(candidate, y, x);
    for (int halving = 0; halving < 40 && !(ll_new >= ll - 1e-12 * std::abs(ll)); ++halving) {
      step *= 0.5;
      candidate = beta + step;
      ll_new = log_likelihood(candidate, y, x);
    }
    beta = candidate;
    ll = ll_new;
    result.log_likelihood_path.push_back(ll);
    result.iterations = iter;

    if (beta.cwiseAbs().maxCoeff() > opts.separation_bound) {
      result.separation_detected = true;
      break;
    }
    if (step.cwiseAbs().maxCoeff() < opts.tol) {
      result.converged = true;
      break;
    }
  }

  refresh(beta);
  bool pinned_pos = true, pinned_neg = true, any_pos = false, any_neg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] == 1.0) {
      any_pos = true;
      pinned_pos = pinned_pos && mu[i] > 1.0 - opts.pin_epsilon;
    } else {
      any_neg = true;
      pinned_neg = pinned_neg && mu[i] < opts.pin_epsilon;
    }
  }
  if ((any_pos && pinned_pos) || (any_neg && pinned_neg)) result.separation_detected = true;
  if (result.separation_detected) result.converged = false;

  result.coefficients = beta;
  result.log_likelihood = ll;
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(m, m));
    result.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  } else {
    result.std_errors = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    result.converged = false;
  }
  return result;
}

double relative_risk(double beta1, double baseline_p) {
  if (!(baseline_p >= 0.0 && baseline_p < 1.0)) throw DomainError("baseline prevalence must be in [0, 1)");
  // exp(b)/(1+(exp(b)-1)p) - 1, rearranged so small b keeps full precision.
  const double e = std::expm1(beta1);
  return e * (1.0 - baseline_p) / (1.0 + e * baseline_p);
}

double two_sided_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must be in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);
}

Interval confidence_interval(double estimate, double std_error, double level) {
  if (!(std_error >= 0.0)) throw DomainError("standard error must be non-negative");
  const double half = two_sided_z(level) * std_error;
  return {estimate - half, estimate + half};
}

Interval confidence_interval(const FitResult& fit, Eigen::Index index, double level) {
  if (!fit.converged) throw NumericalError("confidence interval requested for a non-converged fit");
  if (index < 0 || index >= fit.coefficients.size()) throw DomainError("coefficient index out of range");
  return confidence_interval(fit.coefficients[index], fit.std_errors[index], level);
}

OneHot one_hot(std::span<const std::int64_t> values, std::int64_t reference) {
  const std::set<std::int64_t> distinct(values.begin(), values.end());
  if (distinct.size() < 2) throw DomainError("one-hot encoding needs at least two categories");
  if (!distinct.contains(reference)) throw DomainError("reference category does not occur");

  OneHot out;
  for (auto c : distinct) {
    if (c != reference) out.categories.push_back(c);
  }
  out.columns = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(values.size()),
                                      static_cast<Eigen::Index>(out.categories.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == reference) continue;
    const auto it = std::lower_bound(out.categories.begin(), out.categories.end(), values[i]);
    out.columns(static_cast<Eigen::Index>(i), it - out.categories.begin()) = 1.0;
  }
  return out;
}

}  // namespace confound
