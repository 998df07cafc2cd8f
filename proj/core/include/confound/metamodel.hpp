#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace confound {

/// Configuration of the single-latent-variable population model.
///
/// Every respondent carries a latent sign Q in {-1,+1}; each of the k+1
/// binary responses agrees with Q with probability `p`. Column 0 is the
/// dependent variable, column 1 the predictor, columns 2..k confounders.
struct ModelParams {
  double p = 0.75;
  int k = 1;  ///< regressors excluding the intercept: predictor + (k-1) confounders
  std::int64_t n_respondents = 1;
  double causal_increment = 0.0;  ///< logit increment on column 0 per unit of column 1
  std::uint64_t seed = 0;

  /// Throws DomainError unless 0.5 < p < 1, k >= 1, n_respondents >= 1 and
  /// causal_increment is finite.
  void validate() const;

  std::size_t column_count() const noexcept { return static_cast<std::size_t>(k) + 1; }
};

/// N x (k+1) binary responses plus the latent vector that generated them.
/// Immutable after construction.
class ResponseMatrix {
 public:
  ResponseMatrix(ModelParams params, std::vector<std::int8_t> latent,
                 std::vector<std::uint8_t> responses);

  std::size_t rows() const noexcept { return latent_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  const ModelParams& params() const noexcept { return params_; }

  std::int8_t latent(std::size_t row) const noexcept { return latent_[row]; }
  std::uint8_t operator()(std::size_t row, std::size_t col) const noexcept {
    return responses_[col * rows() + row];
  }
  /// Contiguous view of one response column.
  std::span<const std::uint8_t> column(std::size_t col) const noexcept {
    return {responses_.data() + col * rows(), rows()};
  }
  std::span<const std::int8_t> latent() const noexcept { return latent_; }

  friend bool operator==(const ResponseMatrix& a, const ResponseMatrix& b) noexcept {
    return a.cols_ == b.cols_ && a.latent_ == b.latent_ && a.responses_ == b.responses_;
  }

 private:
  ModelParams params_;
  std::size_t cols_;
  std::vector<std::int8_t> latent_;
  std::vector<std::uint8_t> responses_;  // column-major
};

/// Draw one population. `realization` selects an independent stream under
/// the same master seed (the ensemble uses the replication index).
///
/// With a non-zero causal increment, column 0 is drawn with probability
/// logit^-1(logit(p_i) + increment * R_i1), where p_i = p when Q_i = +1 and
/// 1 - p when Q_i = -1.
ResponseMatrix draw_population(const ModelParams& params, std::size_t column_count,
                               std::uint32_t realization = 0);

double bias_of(double p);
double p_of(double bias);

/// (2p - 1)^2, the pairwise correlation between any two columns when the
/// causal increment is zero.
double theoretical_correlation(double p);

/// Pearson correlation of two columns. Throws UndefinedCorrelationError if
/// either column is constant.
double sample_correlation(const ResponseMatrix& m, std::size_t col_a, std::size_t col_b);
double pearson(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Debug dump: header `Q,R0,R1,...,Rk`, one row per respondent.
void write_csv(std::ostream& out, const ResponseMatrix& m);

}  // namespace confound
