#include "cli.hpp"

#include <algorithm>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "confound/errors.hpp"
#include "confound/version.hpp"

namespace confound::cli {

namespace {

const auto kFormat = CLI::IsMember({"csv", "json"});

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spurious association that survives confounder adjustment", "confound"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "csv";
  unsigned threads = 1;

  SimulateConfig sim;
  auto* simulate = app.add_subcommand("simulate", "Draw one synthetic population as CSV");
  simulate->add_option("--p", sim.params.p, "Agreement probability with the latent variable, in (0.5, 1)")->required();
  simulate->add_option("--k", sim.params.k, "Regressors besides the intercept (predictor + confounders)")->required();
  simulate->add_option("--n", sim.params.n_respondents, "Respondents")->required();
  simulate->add_option("--beta-prime", sim.params.causal_increment, "Causal logit increment on the dependent");
  simulate->add_option("--seed", sim.params.seed, "Master seed")->required();
  simulate->add_option("--realization", sim.realization, "Replication index within the seed");
  simulate->add_option("--out", out_path, "Output file (default stdout)");

  ScanConfig scan;
  std::string baseline = "0";
  auto* scan_cmd = app.add_subcommand("scan", "Ensemble fits over a grid of r and confounder counts");
  scan_cmd->add_option("--r-list", scan.grid.correlations, "Pairwise correlations r")->delimiter(',')->capture_default_str();
  scan_cmd->add_option("--n-list", scan.grid.confounder_counts, "Confounder counts n")->delimiter(',')->capture_default_str();
  scan_cmd->add_option("--N", scan.grid.n_respondents, "Respondents per synthetic data set")->capture_default_str();
  scan_cmd->add_option("--reps", scan.grid.replications, "Replications per cell")->capture_default_str();
  scan_cmd->add_option("--beta-prime", scan.grid.causal_increment, "Causal logit increment")->capture_default_str();
  scan_cmd->add_option("--seed", scan.grid.seed, "Master seed")->required();
  scan_cmd->add_option("--ci-N", scan.grid.ci_respondents, "Population size the intervals are scaled to (default N)");
  scan_cmd->add_option("--baseline", baseline, "Prevalence for relative risk: a number or 'observed'")->capture_default_str();
  scan_cmd->add_flag("--intercept", scan.grid.include_intercept, "Fit with an intercept");
  scan_cmd->add_option("--level", scan.grid.level, "Confidence level")->capture_default_str();
  scan_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  scan_cmd->add_option("--format", format, "csv or json")->check(kFormat)->capture_default_str();
  scan_cmd->add_option("--out", out_path, "Output file (default stdout)");

  FitConfig fit;
  std::string fit_delim = ",";
  bool no_intercept = false;
  auto* fit_cmd = app.add_subcommand("fit", "Logistic regression on a delimited matrix");
  fit_cmd->add_option("--input", fit.input, "Input file")->required();
  fit_cmd->add_option("--dependent", fit.dependent, "Binary dependent column")->required();
  fit_cmd->add_option("--regressors", fit.regressors, "Regressor columns (empty: intercept only)")->delimiter(',');
  fit_cmd->add_flag("--no-intercept", no_intercept, "Omit the intercept");
  fit_cmd->add_option("--level", fit.level, "Confidence level")->capture_default_str();
  fit_cmd->add_option("--delimiter", fit_delim, "Field delimiter")->capture_default_str();
  fit_cmd->add_option("--format", format, "csv or json")->check(kFormat)->capture_default_str();
  fit_cmd->add_option("--out", out_path, "Output file (default stdout)");

  IngestConfig ing;
  std::string ing_delim = "tab";
  std::optional<double> unit_change;
  auto* ingest = app.add_subcommand("ingest", "Recode a survey file and fit cumulative confounder stages");
  ingest->add_option("--data", ing.data, "Delimited survey file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--mapping", ing.mapping, "Mapping spec (COLUMN KIND rules)")->required()->check(CLI::ExistingFile);
  ingest->add_option("--study", ing.study, "Study spec (JSON)")->required()->check(CLI::ExistingFile);
  ingest->add_option("--delimiter", ing_delim, "Field delimiter")->capture_default_str();
  ingest->add_option("--unit-change", unit_change, "Override the study's unit change");
  ingest->add_option("--format", format, "csv or json")->check(kFormat)->capture_default_str();
  ingest->add_option("--out", out_path, "Output file (default stdout)");

  std::string replay_from;
  auto* replay = app.add_subcommand("replay", "Regenerate an output from its embedded configuration");
  replay->add_option("--from", replay_from, "File written by this tool")->required()->check(CLI::ExistingFile);
  replay->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  replay->add_option("--out", out_path, "Output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Output result;
    if (*simulate) {
      result = run_simulate(sim);
    } else if (*scan_cmd) {
      scan.grid.baseline_prevalence = parse_baseline(baseline);
      scan.format = parse_format(format);
      result = run_scan(scan, threads);
    } else if (*fit_cmd) {
      fit.intercept = !no_intercept;
      fit.delimiter = parse_delimiter(fit_delim);
      fit.format = parse_format(format);
      result = run_fit(fit);
    } else if (*ingest) {
      ing.delimiter = parse_delimiter(ing_delim);
      ing.unit_change = unit_change;
      ing.format = parse_format(format);
      result = run_ingest(ing, err);
    } else {
      result = run_replay(replay_from, threads, err);
    }
    write_output(out_path, result.text, out);
    if (result.status != kExitOk) err << "confound: no result could be computed\n";
    return result.status;
  } catch (const IoError& e) {
    err << "confound: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "confound: parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IngestError& e) {
    err << "confound: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "confound: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "confound: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace confound::cli
