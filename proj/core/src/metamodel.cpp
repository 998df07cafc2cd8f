#include "confound/metamodel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "confound/errors.hpp"
#include "confound/glm.hpp"
#include "confound/rng.hpp"

namespace confound {

void ModelParams::validate() const {
  if (!(p > 0.5 && p < 1.0)) {
    throw DomainError("p must satisfy 0.5 < p < 1, got " + std::to_string(p));
  }
  if (k < 1) throw DomainError("k must be >= 1, got " + std::to_string(k));
  if (n_respondents < 1) {
    throw DomainError("n_respondents must be >= 1, got " + std::to_string(n_respondents));
  }
  if (!std::isfinite(causal_increment)) throw DomainError("causal_increment must be finite");
}

ResponseMatrix::ResponseMatrix(ModelParams params, std::vector<std::int8_t> latent,
                               std::vector<std::uint8_t> responses)
    : params_(params), cols_(params.column_count()), latent_(std::move(latent)),
      responses_(std::move(responses)) {
  if (responses_.size() != latent_.size() * cols_) {
    throw DomainError("response storage does not match N x (k+1)");
  }
}

ResponseMatrix draw_population(const ModelParams& params, std::size_t column_count,
                               std::uint32_t realization) {
  params.validate();
  if (column_count != params.column_count()) {
    throw DomainError("column_count must equal k+1 (" + std::to_string(params.column_count()) +
                      "), got " + std::to_string(column_count));
  }

  const auto n = static_cast<std::size_t>(params.n_respondents);
  const CounterRng rng(params.seed);
  const double p = params.p;

  std::vector<std::int8_t> latent(n);
  for (std::size_t i = 0; i < n; ++i) {
    latent[i] = rng.uniform(realization, StreamTag::kLatent, i) < 0.5 ? 1 : -1;
  }

  std::vector<std::uint8_t> responses(n * column_count);
  for (std::size_t j = 0; j < column_count; ++j) {
    std::uint8_t* col = responses.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) {
      const int y = rng.uniform(realization, StreamTag::kResponse, j * n + i) < p ? 1 : -1;
      col[i] = static_cast<std::uint8_t>((latent[i] * y + 1) / 2);
    }
  }

  if (params.causal_increment != 0.0) {
    // Column 0 is redrawn from the second uniform of each cell's block so it
    // never shares a draw with the symmetric column.
    const double logit_hi = logit(p);
    const std::uint8_t* predictor = responses.data() + n;
    for (std::size_t i = 0; i < n; ++i) {
      const double base = latent[i] > 0 ? logit_hi : -logit_hi;
      const double prob = inverse_logit(base + params.causal_increment * predictor[i]);
      const double u = rng.uniform_pair(realization, StreamTag::kResponse, i)[1];
      responses[i] = u < prob ? 1 : 0;
    }
  }

  return ResponseMatrix(params, std::move(latent), std::move(responses));
}

double bias_of(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0,1]");
  return 2.0 * p - 1.0;
}

double p_of(double bias) {
  if (!(bias >= -1.0 && bias <= 1.0)) throw DomainError("bias outside [-1,1]");
  return (bias + 1.0) / 2.0;
}

double theoretical_correlation(double p) {
  if (!(p > 0.5 && p < 1.0)) throw DomainError("p must satisfy 0.5 < p < 1");
  const double b = 2.0 * p - 1.0;
  return b * b;
}

double pearson(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size() || a.empty()) throw DomainError("columns must have equal, non-zero length");
  // Binary data: the correlation follows from the four cell counts exactly.
  std::int64_t sa = 0, sb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    sab += a[i] & b[i];
  }
  const auto n = static_cast<double>(a.size());
  const double cov = static_cast<double>(sab) / n - (sa / n) * (sb / n);
  const double va = (sa / n) * (1.0 - sa / n);
  const double vb = (sb / n) * (1.0 - sb / n);
  if (va <= 0.0 || vb <= 0.0) throw UndefinedCorrelationError("correlation undefined for a constant column");
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

double sample_correlation(const ResponseMatrix& m, std::size_t col_a, std::size_t col_b) {
  if (col_a >= m.cols() || col_b >= m.cols()) throw DomainError("column index out of range");
  if (col_a == col_b) throw DomainError("sample_correlation requires distinct columns");
  return pearson(m.column(col_a), m.column(col_b));
}

void write_csv(std::ostream& out, const ResponseMatrix& m) {
  out << 'Q';
  for (std::size_t j = 0; j < m.cols(); ++j) out << ",R" << j;
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << static_cast<int>(m.latent(i));
    for (std::size_t j = 0; j < m.cols(); ++j) out << ',' << static_cast<int>(m(i, j));
    out << '\n';
  }
}

}  // namespace confound
