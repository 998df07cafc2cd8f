// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "cli.hpp"
#include "confound/ensemble.hpp"
#include "confound/glm.hpp"
#include "confound/ingest.hpp"
#include "confound/mapping.hpp"
#include "confound/metamodel.hpp"
#include "oracles.hpp"

using namespace confound;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Verdict correlation_law() {
  const auto start = std::chrono::steady_clock::now();
  ModelParams params;
  params.p = 0.75;
  params.k = 3;
  params.n_respondents = 200000;
  params.seed = 1;
  const auto m = draw_population(params, params.column_count());
  Verdict v;
  double lo = 1.0, hi = -1.0;
  for (std::size_t a = 0; a < m.cols(); ++a) {
    for (std::size_t b = a + 1; b < m.cols(); ++b) {
      const double r = sample_correlation(m, a, b);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      v.pass = v.pass && r >= 0.24 && r <= 0.26;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.pass = v.pass && secs < 10.0;
  v.detail = "pairwise r in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "], " + fmt("%.2f", secs) + " s";
  return v;
}

struct SurfaceCell {
  double p;
  int k;
  EnsembleSummary summary;
};

const std::vector<SurfaceCell>& surface() {
  static const std::vector<SurfaceCell> cells = [] {
    std::vector<SurfaceCell> out;
    EnsembleOptions opts;
    opts.threads = worker_count();
    for (double p : {0.55, 0.6, 0.7, 0.8}) {
      for (int k : {2, 3, 5, 9}) {
        ModelParams params;
        params.p = p;
        params.k = k;
        params.n_respondents = 10000;
        params.seed = 2024;
        out.push_back({p, k, run_ensemble(params, 200, opts)});
      }
    }
    return out;
  }();
  return cells;
}

Verdict beta_surface() {
  Verdict v;
  int failed = 0;
  std::string misses;
  double worst = 0.0;
  for (const auto& c : surface()) {
    const double f = empirical_beta_formula(c.p, c.k);
    const double resid = c.summary.mean_beta1 - f;
    const double tol = std::max(0.15 * f, 3.0 * c.summary.mc_error_beta1);
    worst = std::max(worst, std::abs(resid) / f);
    if (std::abs(resid) > tol || c.summary.excluded > 2) {
      ++failed;
      misses += " (p=" + fmt("%.2f", c.p) + ",k=" + std::to_string(c.k) + ": " + fmt("%+.1f%%", 100 * resid / f) + ")";
    }
  }
  v.pass = failed == 0;
  v.detail = std::to_string(16 - failed) + "/16 cells within tolerance, worst relative residual " +
             fmt("%.1f%%", 100 * worst) + (misses.empty() ? "" : "; outside:" + misses);
  return v;
}

Verdict sigma_surface() {
  Verdict v;
  int failed = 0;
  double worst = 0.0;
  for (const auto& c : surface()) {
    const double f = empirical_sigma_formula(c.p, c.k, 10000.0);
    const double rel = std::abs(c.summary.mean_sigma1 - f) / f;
    worst = std::max(worst, rel);
    failed += rel > 0.15;
  }
  double scaling = 0.0;
  for (double p : {0.55, 0.6, 0.7, 0.8}) {
    for (int k : {2, 3, 5, 9}) {
      for (double n : {100.0, 1e4, 3.7e5}) {
        const double ratio = empirical_sigma_formula(p, k, n) / empirical_sigma_formula(p, k, 4.0 * n);
        scaling = std::max(scaling, std::abs(ratio - 2.0));
      }
    }
  }
  v.pass = failed == 0 && scaling <= 1e-12;
  v.detail = std::to_string(16 - failed) + "/16 cells within 15%, worst " + fmt("%.1f%%", 100 * worst) +
             "; N^-1/2 ratio error " + fmt("%.1e", scaling);
  return v;
}

Verdict causal_shift() {
  GridSpec spec;
  spec.correlations = {0.01, 0.15};
  spec.confounder_counts = {1};
  spec.n_respondents = 50000;
  spec.replications = 100;
  spec.seed = 77;
  const auto null_rows = scan_grid(spec, worker_count());
  spec.causal_increment = 0.10;
  const auto causal_rows = scan_grid_causal(spec, worker_count());
  Verdict v;
  if (!null_rows[0].ok || !null_rows[1].ok || !causal_rows[0].ok || !causal_rows[1].ok) {
    v.pass = false;
    v.detail = "a cell failed";
    return v;
  }
  const double shift = causal_rows[0].relative_risk - null_rows[0].relative_risk;
  const double strong = causal_rows[1].relative_risk;
  const double bound = null_rows[1].relative_risk + 0.10 - 0.01;
  v.pass = shift >= 0.08 && shift <= 0.12 && strong > bound;
  v.detail = "r=0.01 shift " + fmt("%.4f", shift) + "; r=0.15 observed " + fmt("%.4f", strong) + " vs bound " +
             fmt("%.4f", bound);
  return v;
}

Verdict regression_oracle() {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> cell(1, 20);
  double worst_beta = 0.0, worst_se = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const oracle::Table2x2 table{cell(gen), cell(gen), cell(gen), cell(gen)};
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
    table.expand(y, x);
    const auto fit = fit_logistic(y, DesignMatrix(x, {"x"}, true));
    worst_beta = std::max(worst_beta, std::abs(fit.coefficients[1] - table.log_odds_ratio()));
    worst_se = std::max(worst_se, std::abs(fit.std_errors[1] - table.log_odds_ratio_se()));
  }
  return {worst_beta <= 1e-6 && worst_se <= 1e-6,
          "1000 tables, max |beta1 error| " + fmt("%.1e", worst_beta) + ", max |sigma1 error| " + fmt("%.1e", worst_se)};
}

Verdict gradient_check() {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    Eigen::MatrixXd x(200, 4);
    Eigen::VectorXd beta(4), y(200);
    for (Eigen::Index j = 0; j < 4; ++j) beta[j] = 0.5 * normal(gen);
    for (Eigen::Index i = 0; i < 200; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = normal(gen);
      y[i] = unif(gen) < 0.4 ? 1.0 : 0.0;
    }
    const Eigen::VectorXd analytic = score(beta, y, x);
    const Eigen::VectorXd numeric = oracle::central_gradient(
        [&](const Eigen::VectorXd& b) { return oracle::naive_log_likelihood(b, y, x); }, beta);
    for (Eigen::Index j = 0; j < 4; ++j)
      worst = std::max(worst, std::abs(analytic[j] - numeric[j]) / std::max(1.0, std::abs(numeric[j])));
  }
  return {worst <= 1e-5, "50 instances, max relative difference " + fmt("%.1e", worst)};
}

Verdict null_honesty() {
  GridSpec spec;
  spec.n_respondents = 10000;
  spec.ci_respondents = 50000;
  spec.replications = 200;
  spec.seed = 99;
  const auto rows = scan_grid(spec, worker_count());
  Verdict v;
  int positive = 0, significant = 0, required = 0;
  for (const auto& r : rows) {
    const bool pos = r.ok && r.mean_beta1 > 0.0;
    positive += pos;
    v.pass = v.pass && pos;
    if (r.r >= 0.05 - 1e-12 && r.n_confounders <= 2) {
      ++required;
      const bool excl = r.ok && r.ci_low > 0.0;
      significant += excl;
      v.pass = v.pass && excl;
    }
  }
  v.detail = std::to_string(positive) + "/" + std::to_string(rows.size()) + " cells positive; " +
             std::to_string(significant) + "/" + std::to_string(required) + " required CIs exclude 0";
  return v;
}

Verdict determinism() {
  const auto dir = std::filesystem::temp_directory_path() / ("confound_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto one = (dir / "threads1.csv").string(), eight = (dir / "threads8.csv").string();
  std::ostringstream sink;
  const std::vector<std::string> base{"scan", "--seed", "8", "--reps", "20", "--N", "5000"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1", "--out", one});
  b.insert(b.end(), {"--threads", "8", "--out", eight});
  const int ca = cli::run(a, sink, sink), cb = cli::run(b, sink, sink);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string fa = slurp(one), fb = slurp(eight);
  std::filesystem::remove_all(dir);
  return {ca == 0 && cb == 0 && !fa.empty() && fa == fb,
          "exit codes " + std::to_string(ca) + "/" + std::to_string(cb) + ", " + std::to_string(fa.size()) +
              " bytes, " + (fa == fb ? "identical" : "different")};
}

Verdict ingest_fidelity() {
  const auto spec = load_mapping_spec(std::string(CONFOUND_FIXTURE_DIR) + "/survey_mapping.txt");
  const auto* alcever = spec.find("ALCEVER");
  if (spec.columns.size() != 79 || alcever == nullptr) return {false, "fixture incomplete"};
  RawTable raw;
  raw.headers = {"ALCEVER"};
  raw.columns = {{"1", "2", "85", "94", "97"}};
  const auto data = apply_mappings(raw, {*alcever});
  std::string mapped;
  bool ok = true;
  const double expected[] = {1, 0, 0, 0, 0};
  for (Eigen::Index i = 0; i < 5; ++i) {
    mapped += (i ? "," : "") + fmt("%g", data.values(i, 0));
    ok = ok && data.values(i, 0) == expected[i];
  }
  return {ok, "79 columns parsed (" + std::to_string(spec.warnings.size()) + " overlap warning); ALCEVER -> {" +
                  mapped + "}"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"correlation law", correlation_law},
      {"beta surface", beta_surface},
      {"sigma surface", sigma_surface},
      {"causal shift", causal_shift},
      {"regression oracle", regression_oracle},
      {"gradient check", gradient_check},
      {"null-effect honesty", null_honesty},
      {"determinism", determinism},
      {"ingest fidelity", ingest_fidelity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::printf("%s  criterion %zu (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
