// Command-line front end for the npiv library.
//
//   npiv estimate    --input data.csv [--estimator kernel|series] ...
//   npiv simulate    [--n 200 --reps 1000 --a 0.05,0.1 --h 0.2 --band --out prefix]
//   npiv rate-study  [--n 100,200,400,800 --reps 300]
//   npiv spectrum    (--input data.csv | --dgp) [--grid-size 129]
//
// Exit codes: 0 success, 2 input error, 3 parameter error, 4 numerical
// invariant violation.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "npiv/dgp.hpp"
#include "npiv/errors.hpp"
#include "npiv/kernel_iv.hpp"
#include "npiv/monte_carlo.hpp"
#include "npiv/operator.hpp"
#include "npiv/report_io.hpp"
#include "npiv/series_iv.hpp"

namespace {

enum ExitCode { kOk = 0, kUnexpected = 1, kInput = 2, kParameter = 3, kNumerical = 4 };

void with_output(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw npiv::InputError("cannot open output file '" + path + "'");
  write(out);
}

Eigen::MatrixXd column(const std::vector<double>& values) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i), 0) = values[i];
  return out;
}

struct CommonGrid {
  int grid_size = 65;
  int w_grid_size = 0;
  std::string scheme = "gauss";

  void add(CLI::App* app) {
    app->add_option("--grid-size", grid_size, "Quadrature nodes M on [0,1]")->capture_default_str();
    app->add_option("--w-grid-size", w_grid_size, "Nodes for the w-integral (0: same as M)")
        ->capture_default_str();
    app->add_option("--scheme", scheme, "Quadrature scheme: gauss or trapezoid")->capture_default_str();
  }
  npiv::OperatorOptions options() const {
    return {grid_size, w_grid_size, npiv::parse_grid_scheme(scheme)};
  }
};

struct EstimateArgs {
  std::string input;
  std::string estimator = "kernel";
  double h = 0.2;
  double h_z = 0.2;
  double a = 0.1;
  int m = 0;
  int band = 0;
  std::string boundary = "plain";
  std::string kernel = "epanechnikov";
  std::vector<double> eval;
  std::vector<double> z0;
  CommonGrid grid;
  std::string out;
  std::string format = "csv";
};

int run_estimate(const EstimateArgs& args) {
  const npiv::CsvDataset csv = npiv::read_dataset_csv(args.input);
  for (const std::string& warning : csv.warnings) std::cerr << "warning: " << warning << '\n';
  const npiv::Dataset& data = csv.data;

  if (args.estimator == "series") {
    if (data.has_z()) throw npiv::ParameterError("the series estimator does not take z columns");
    npiv::SeriesIvConfig config;
    if (args.m > 0) config.m = args.m;
    if (args.band > 0) config.band = args.band;
    config.a = args.a;
    if (!args.eval.empty()) config.eval_points = column(args.eval).col(0);
    const npiv::SeriesResult result = npiv::series_estimate(data, config);
    if (result.estimate.diagnostics.ill_determined)
      std::cerr << "warning: more basis terms than observations\n";
    with_output(args.out, [&](std::ostream& out) {
      if (args.format == "json") out << npiv::estimate_json(result.estimate, "series", &result.fit);
      else npiv::write_estimate_csv(out, result.estimate, "series");
    });
    return kOk;
  }
  if (args.estimator != "kernel")
    throw npiv::ParameterError("unknown estimator '" + args.estimator + "'");

  npiv::KernelIvConfig config;
  config.h = args.h;
  config.h_z = args.h_z;
  config.a = args.a;
  config.grid = args.grid.options();
  config.kernel = npiv::parse_kernel_family(args.kernel);
  config.boundary = npiv::parse_boundary_policy(args.boundary);
  if (!args.eval.empty()) config.eval_points = column(args.eval);

  npiv::Estimate estimate;
  if (data.has_z()) {
    if (args.z0.empty()) throw npiv::ParameterError("input has z columns: --z0 is required");
    const Eigen::VectorXd z0 = column(args.z0).col(0);
    estimate = npiv::estimate_multivariate(data, config, z0);
    if (estimate.diagnostics.sparse_locality)
      std::cerr << "warning: no observation has Z within bandwidth of z0\n";
  } else {
    estimate = npiv::estimate_bivariate(data, config);
  }
  with_output(args.out, [&](std::ostream& out) {
    if (args.format == "json") out << npiv::estimate_json(estimate, "kernel");
    else npiv::write_estimate_csv(out, estimate, "kernel");
  });
  return kOk;
}

struct SimulateArgs {
  std::string estimator = "kernel";
  long n = 200;
  int reps = 1000;
  std::uint64_t seed = 20050101;
  std::vector<double> a;
  std::vector<double> h;
  std::string boundary = "plain";
  std::string kernel = "epanechnikov";
  int m = 0;
  int band_terms = 0;
  double level = 0.95;
  int threads = 0;
  bool band = false;
  double band_a = 0.1;
  double band_h = 0.2;
  CommonGrid grid;
  std::string out;
  std::string format = "csv";
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_simulate(const SimulateArgs& args) {
  npiv::McConfig config;
  config.n = args.n;
  config.reps = args.reps;
  config.base_seed = args.seed;
  config.estimator = npiv::parse_estimator(args.estimator);
  config.boundary = npiv::parse_boundary_policy(args.boundary);
  config.kernel = npiv::parse_kernel_family(args.kernel);
  config.grid = args.grid.options();
  config.series_m = args.m;
  config.series_band = args.band_terms;
  config.band_level = args.level;
  config.threads = resolve_threads(args.threads);
  if (args.a.empty() != args.h.empty() && config.estimator == npiv::EstimatorKind::Kernel)
    throw npiv::ParameterError("give both --a and --h lists, or neither for the default grid");
  if (!args.a.empty()) {
    const std::vector<double> hs = args.h.empty() ? std::vector<double>{args.band_h} : args.h;
    for (double a : args.a)
      for (double h : hs) config.cells.push_back({a, h});
  } else {
    config.cells = npiv::default_cells();
  }
  if (args.band && args.out.empty()) throw npiv::ParameterError("--band requires --out");

  std::size_t band_cell = 0;
  if (args.band) {
    auto it = std::find_if(config.cells.begin(), config.cells.end(), [&](const npiv::McCell& c) {
      return c.a == args.band_a && c.h == args.band_h;
    });
    if (it == config.cells.end()) {
      config.cells.push_back({args.band_a, args.band_h});
      it = config.cells.end() - 1;
    }
    band_cell = static_cast<std::size_t>(it - config.cells.begin());
  }

  const npiv::Dgp dgp;
  const npiv::McReport report = npiv::run_monte_carlo(config, dgp);
  for (const npiv::McCellReport& cell : report.cells)
    if (cell.flagged())
      std::cerr << "warning: cell a=" << cell.cell.a << " h=" << cell.cell.h << " had "
                << cell.failures << " failed replications\n";

  if (args.out.empty()) {
    with_output("", [&](std::ostream& out) {
      if (args.format == "json") out << npiv::mc_json(report);
      else npiv::write_mc_csv(out, report);
    });
    return kOk;
  }
  with_output(args.out + ".csv", [&](std::ostream& out) { npiv::write_mc_csv(out, report); });
  with_output(args.out + ".json", [&](std::ostream& out) { out << npiv::mc_json(report); });
  if (args.band) {
    with_output(args.out + "_band.csv",
                [&](std::ostream& out) { npiv::write_band_csv(out, report, band_cell); });
    with_output(args.out + "_band.svg",
                [&](std::ostream& out) { npiv::write_band_svg(out, report, band_cell); });
  }
  return kOk;
}

struct RateArgs {
  std::vector<long> sizes{100, 200, 400, 800};
  int reps = 300;
  std::uint64_t seed = 20050101;
  double gamma = 7.0 / 24.0;
  double a_ref = 0.10;
  double h_ref = 0.30;
  std::string boundary = "plain";
  int threads = 0;
  CommonGrid grid;
  std::string out;
  std::string format = "csv";
};

int run_rate(const RateArgs& args) {
  npiv::RateStudyConfig config;
  config.sizes.assign(args.sizes.begin(), args.sizes.end());
  config.reps = args.reps;
  config.base_seed = args.seed;
  config.gamma = args.gamma;
  config.a_ref = args.a_ref;
  config.h_ref = args.h_ref;
  config.boundary = npiv::parse_boundary_policy(args.boundary);
  config.grid = args.grid.options();
  config.threads = resolve_threads(args.threads);
  const npiv::RateStudyReport report = npiv::rate_study(config, npiv::Dgp());
  with_output(args.out, [&](std::ostream& out) {
    if (args.format == "json") out << npiv::rate_json(report);
    else npiv::write_rate_csv(out, report);
  });
  return kOk;
}

struct SpectrumArgs {
  std::string input;
  bool dgp = false;
  double h = 0.2;
  double a = 0.1;
  std::string boundary = "plain";
  std::string kernel = "epanechnikov";
  int fit_first = 1;
  int fit_last = 20;
  CommonGrid grid{129, 0, "gauss"};
  std::string out;
  std::string format = "csv";
};

int run_spectrum(const SpectrumArgs& args) {
  if (args.dgp == !args.input.empty())
    throw npiv::ParameterError("give exactly one of --input or --dgp");
  npiv::SpectrumTable table;
  if (args.dgp) {
    const npiv::Dgp dgp;
    const npiv::DiscretizedOperator op = npiv::discretize_density(
        [&](double x, double w) { return dgp.density(x, w); }, args.grid.options(), args.a);
    table.eigenvalues = op.spectrum().values;
    table.analytic.resize(table.eigenvalues.size());
    for (Eigen::Index j = 0; j < table.analytic.size(); ++j)
      table.analytic[j] = dgp.eigenvalue(static_cast<int>(j) + 1);
  } else {
    const npiv::CsvDataset csv = npiv::read_dataset_csv(args.input);
    for (const std::string& warning : csv.warnings) std::cerr << "warning: " << warning << '\n';
    if (csv.data.has_z()) std::cerr << "warning: z columns are ignored by the spectrum command\n";
    const npiv::Dataset data(csv.data.x(), csv.data.w(), csv.data.y());
    const npiv::GeneralizedKernel kernel(npiv::BaseKernel(npiv::parse_kernel_family(args.kernel)),
                                         npiv::parse_boundary_policy(args.boundary), args.h);
    table.eigenvalues = npiv::discretize_operator(data, kernel, args.grid.options(), args.a).spectrum().values;
  }
  table.fit_first = args.fit_first;
  table.fit_last = std::min<int>(args.fit_last, static_cast<int>(table.eigenvalues.size()));
  table.decay_exponent = npiv::fit_decay_exponent(table.eigenvalues, table.fit_first, table.fit_last);
  with_output(args.out, [&](std::ostream& out) {
    if (args.format == "json") out << npiv::spectrum_json(table);
    else npiv::write_spectrum_csv(out, table);
  });
  return kOk;
}

void add_format(CLI::App* app, std::string& format) {
  app->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric instrumental-variables regression"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand("estimate", "Estimate g from a CSV file with columns x,w,y[,z1..]");
  estimate->add_option("--input", est.input, "Input CSV")->required();
  estimate->add_option("--estimator", est.estimator, "kernel or series")->capture_default_str();
  estimate->add_option("--h", est.h, "Bandwidth for X and W")->capture_default_str();
  estimate->add_option("--hz", est.h_z, "Bandwidth for Z (multivariate)")->capture_default_str();
  estimate->add_option("--a", est.a, "Ridge parameter")->capture_default_str();
  estimate->add_option("--m", est.m, "Series terms (0: ceil(n^(1/6)))")->capture_default_str();
  estimate->add_option("--N", est.band, "Series band half-width (0: default)")->capture_default_str();
  estimate->add_option("--boundary", est.boundary, "plain or matched")->capture_default_str();
  estimate->add_option("--kernel", est.kernel, "Base kernel family")->capture_default_str();
  estimate->add_option("--eval", est.eval, "Evaluation points (default 0.05,...,0.95)")->delimiter(',');
  estimate->add_option("--z0", est.z0, "Exogenous covariate value for the multivariate estimator")
      ->delimiter(',');
  est.grid.add(estimate);
  estimate->add_option("--out", est.out, "Output file (default stdout)");
  add_format(estimate, est.format);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo study on the built-in design");
  simulate->add_option("--estimator", sim.estimator, "kernel or series")->capture_default_str();
  simulate->add_option("--n", sim.n, "Sample size")->capture_default_str();
  simulate->add_option("--reps", sim.reps, "Replications per cell")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Base seed; replication r uses seed + r")->capture_default_str();
  simulate->add_option("--a", sim.a, "Ridge values (cells are the product with --h)")->delimiter(',');
  simulate->add_option("--h", sim.h, "Bandwidth values")->delimiter(',');
  simulate->add_option("--boundary", sim.boundary, "plain or matched")->capture_default_str();
  simulate->add_option("--kernel", sim.kernel, "Base kernel family")->capture_default_str();
  simulate->add_option("--m", sim.m, "Series terms (0: default)")->capture_default_str();
  simulate->add_option("--N", sim.band_terms, "Series band half-width (0: default)")->capture_default_str();
  simulate->add_option("--level", sim.level, "Estimation band coverage")->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads (0: all cores)")->capture_default_str();
  simulate->add_flag("--band", sim.band, "Also write the estimation band table and SVG plot");
  simulate->add_option("--band-a", sim.band_a, "Ridge of the band cell")->capture_default_str();
  simulate->add_option("--band-h", sim.band_h, "Bandwidth of the band cell")->capture_default_str();
  sim.grid.add(simulate);
  simulate->add_option("--out", sim.out, "Output prefix: writes <out>.csv, <out>.json");
  add_format(simulate, sim.format);

  RateArgs rate;
  CLI::App* rate_cmd = app.add_subcommand("rate-study", "Fit the log-log MISE slope against n");
  rate_cmd->add_option("--n", rate.sizes, "Sample sizes")->delimiter(',')->capture_default_str();
  rate_cmd->add_option("--reps", rate.reps, "Replications per size")->capture_default_str();
  rate_cmd->add_option("--seed", rate.seed, "Base seed")->capture_default_str();
  rate_cmd->add_option("--gamma", rate.gamma, "Bandwidth exponent: h ~ n^-gamma")->capture_default_str();
  rate_cmd->add_option("--a-ref", rate.a_ref, "Ridge at n = 200")->capture_default_str();
  rate_cmd->add_option("--h-ref", rate.h_ref, "Bandwidth at n = 200")->capture_default_str();
  rate_cmd->add_option("--boundary", rate.boundary, "plain or matched")->capture_default_str();
  rate_cmd->add_option("--threads", rate.threads, "Worker threads (0: all cores)")->capture_default_str();
  rate.grid.add(rate_cmd);
  rate_cmd->add_option("--out", rate.out, "Output file (default stdout)");
  add_format(rate_cmd, rate.format);

  SpectrumArgs spec;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the estimated or exact operator");
  spectrum->add_option("--input", spec.input, "Input CSV");
  spectrum->add_flag("--dgp", spec.dgp, "Use the exact density of the built-in design");
  spectrum->add_option("--h", spec.h, "Bandwidth")->capture_default_str();
  spectrum->add_option("--a", spec.a, "Ridge used for the factorization")->capture_default_str();
  spectrum->add_option("--boundary", spec.boundary, "plain or matched")->capture_default_str();
  spectrum->add_option("--kernel", spec.kernel, "Base kernel family")->capture_default_str();
  spectrum->add_option("--fit-first", spec.fit_first, "First index of the decay fit")->capture_default_str();
  spectrum->add_option("--fit-max", spec.fit_last, "Last index of the decay fit")->capture_default_str();
  spec.grid.add(spectrum);
  spectrum->add_option("--out", spec.out, "Output file (default stdout)");
  add_format(spectrum, spec.format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParameter;
  }

  try {
    if (estimate->parsed()) return run_estimate(est);
    if (simulate->parsed()) return run_simulate(sim);
    if (rate_cmd->parsed()) return run_rate(rate);
    if (spectrum->parsed()) return run_spectrum(spec);
  } catch (const npiv::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const npiv::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kParameter;
  } catch (const npiv::DomainError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kParameter;
  } catch (const npiv::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnexpected;
  }
  return kUnexpected;
}
