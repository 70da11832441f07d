#include "npiv/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "npiv/errors.hpp"
#include "npiv/kernel_iv.hpp"
#include "npiv/series_iv.hpp"

namespace npiv {
namespace {

constexpr std::size_t kKeptMessages = 5;

Eigen::VectorXd resolve_points(const McConfig& config) {
  return config.eval_points.size() > 0 ? config.eval_points : default_eval_points().col(0);
}

void check_config(const McConfig& config) {
  if (config.n < 2) throw ParameterError("Monte Carlo sample size must be at least 2");
  if (config.reps < 1) throw ParameterError("Monte Carlo needs at least one replication");
  if (!(config.band_level > 0.0 && config.band_level <= 1.0))
    throw ParameterError("band level must lie in (0, 1]");
  for (const McCell& cell : config.cells)
    if (!(cell.a > 0.0) || !(cell.h > 0.0))
      throw ParameterError("every Monte Carlo cell needs a > 0 and h > 0");
}

Eigen::VectorXd estimate_once(const McConfig& config, const McCell& cell, const Dataset& data,
                              const Eigen::VectorXd& points) {
  if (config.estimator == EstimatorKind::Series) {
    SeriesIvConfig sc;
    if (config.series_m > 0) sc.m = config.series_m;
    if (config.series_band > 0) sc.band = config.series_band;
    sc.a = cell.a;
    sc.eval_points = points;
    return series_estimate(data, sc).estimate.values;
  }
  KernelIvConfig kc;
  kc.h = cell.h;
  kc.a = cell.a;
  kc.grid = config.grid;
  kc.kernel = config.kernel;
  kc.boundary = config.boundary;
  kc.eval_points = points;
  kc.spectrum_diagnostics = false;
  return estimate_bivariate(data, kc).values;
}

struct CellRuns {
  std::vector<Eigen::MatrixXd> values;                // per cell: reps x points
  std::vector<std::vector<std::string>> errors;       // per replication: one slot per cell
};

// Replication r always uses seed base_seed + r and writes only its own rows,
// so the output is independent of the thread count and scheduling.
CellRuns run_cells(const McConfig& config, const std::vector<McCell>& cells, const Dgp& dgp,
                   const Eigen::VectorXd& points) {
  const int reps = config.reps;
  CellRuns runs;
  runs.values.assign(cells.size(), Eigen::MatrixXd::Constant(
                                       reps, points.size(), std::numeric_limits<double>::quiet_NaN()));
  runs.errors.assign(reps, std::vector<std::string>(cells.size()));
  dgp.table();

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < reps; r = next++) {
      std::optional<Dataset> data;
      try {
        data.emplace(dgp.sample(config.n, config.base_seed + static_cast<std::uint64_t>(r)));
      } catch (const std::exception& e) {
        for (std::size_t c = 0; c < cells.size(); ++c) runs.errors[r][c] = e.what();
        continue;
      }
      for (std::size_t c = 0; c < cells.size(); ++c) {
        try {
          runs.values[c].row(r) = estimate_once(config, cells[c], *data, points).transpose();
        } catch (const std::exception& e) {
          runs.errors[r][c] = e.what();
        }
      }
    }
  };
  const int threads = std::max(1, std::min(config.threads, reps));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return runs;
}

McCellReport summarize(const McCell& cell, const Eigen::MatrixXd& values,
                       const std::vector<std::vector<std::string>>& errors, std::size_t index,
                       const Eigen::VectorXd& truth, double level) {
  McCellReport report;
  report.cell = cell;
  std::vector<Eigen::Index> ok;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    const std::string& message = errors[r][index];
    if (message.empty()) {
      ok.push_back(r);
    } else {
      ++report.failures;
      if (report.failure_messages.size() < kKeptMessages)
        report.failure_messages.push_back("replication " + std::to_string(r) + ": " + message);
    }
  }
  const Eigen::Index points = truth.size();
  const auto count = static_cast<double>(ok.size());
  report.mean = Eigen::VectorXd::Zero(points);
  report.point_var = Eigen::VectorXd::Zero(points);
  report.point_mse = Eigen::VectorXd::Zero(points);
  report.band = Eigen::VectorXd::Zero(points);
  if (ok.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.mean.setConstant(nan);
    report.point_bias2 = report.point_var = report.point_mse = report.band = report.mean;
    report.bias2 = report.var = report.mse = nan;
    return report;
  }
  Eigen::MatrixXd kept(static_cast<Eigen::Index>(ok.size()), points);
  for (std::size_t k = 0; k < ok.size(); ++k) kept.row(static_cast<Eigen::Index>(k)) = values.row(ok[k]);

  report.mean = kept.colwise().sum().transpose() / count;
  for (Eigen::Index j = 0; j < points; ++j) {
    report.point_var[j] = (kept.col(j).array() - report.mean[j]).square().sum() / count;
    report.point_mse[j] = (kept.col(j).array() - truth[j]).square().sum() / count;
  }
  report.point_bias2 = (report.mean - truth).array().square().matrix();
  report.bias2 = report.point_bias2.mean();
  report.var = report.point_var.mean();
  report.mse = report.point_mse.mean();
  if (kept.rows() >= 2) {
    report.band = estimation_band(kept, truth, level);
  } else {
    report.band = (kept.row(0).transpose() - truth).cwiseAbs();
  }
  return report;
}

std::string canonical_text(const McConfig& config, const std::vector<McCell>& cells,
                           const Eigen::VectorXd& points) {
  std::ostringstream out;
  out.precision(17);
  out << "n=" << config.n << ";reps=" << config.reps << ";seed=" << config.base_seed
      << ";estimator=" << to_string(config.estimator) << ";boundary=" << to_string(config.boundary)
      << ";kernel=" << to_string(config.kernel) << ";grid=" << config.grid.grid_size << ','
      << config.grid.w_grid_size << ',' << to_string(config.grid.scheme)
      << ";series=" << config.series_m << ',' << config.series_band << ";level=" << config.band_level
      << ";cells=";
  for (const McCell& c : cells) out << c.a << ':' << c.h << ',';
  out << ";points=";
  for (Eigen::Index j = 0; j < points.size(); ++j) out << points[j] << ',';
  return out.str();
}

}  // namespace

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "kernel") return EstimatorKind::Kernel;
  if (name == "series") return EstimatorKind::Series;
  throw ParameterError("unknown estimator '" + std::string(name) + "' (expected kernel or series)");
}

std::string_view to_string(EstimatorKind kind) {
  return kind == EstimatorKind::Kernel ? "kernel" : "series";
}

std::vector<McCell> default_cells() {
  std::vector<McCell> cells;
  for (double a : {0.05, 0.10, 0.15, 0.20})
    for (double h : {0.1, 0.2, 0.3, 0.4}) cells.push_back({a, h});
  return cells;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

McReport run_monte_carlo(const McConfig& config, const Dgp& dgp) {
  check_config(config);
  McReport report;
  report.config = config;
  if (report.config.cells.empty()) report.config.cells = default_cells();
  report.eval_points = resolve_points(config);
  for (Eigen::Index j = 0; j < report.eval_points.size(); ++j)
    if (!(report.eval_points[j] >= 0.0 && report.eval_points[j] <= 1.0))
      throw DomainError("evaluation points must lie in [0, 1]");
  report.truth.resize(report.eval_points.size());
  for (Eigen::Index j = 0; j < report.eval_points.size(); ++j)
    report.truth[j] = dgp.g_true(report.eval_points[j]);
  report.config_hash = fnv1a_hex(canonical_text(config, report.config.cells, report.eval_points));

  const CellRuns runs = run_cells(config, report.config.cells, dgp, report.eval_points);
  for (std::size_t c = 0; c < report.config.cells.size(); ++c)
    report.cells.push_back(summarize(report.config.cells[c], runs.values[c], runs.errors, c,
                                     report.truth, config.band_level));
  return report;
}

Eigen::MatrixXd replicate_estimates(const McConfig& config, const McCell& cell, const Dgp& dgp) {
  check_config(config);
  return run_cells(config, {cell}, dgp, resolve_points(config)).values.front();
}

double theoretical_rate_exponent(double alpha, double beta) {
  return -(2.0 * beta - 1.0) / (2.0 * beta + alpha);
}

RateStudyReport rate_study(const RateStudyConfig& config, const Dgp& dgp) {
  if (config.sizes.size() < 3) throw ParameterError("rate study needs at least 3 sample sizes");
  if (config.reps < 1) throw ParameterError("rate study needs at least one replication");
  if (!(config.a_ref > 0.0) || !(config.h_ref > 0.0))
    throw ParameterError("reference ridge and bandwidth must be positive");
  const double ridge_exponent = config.alpha / (2.0 * config.beta + config.alpha);

  RateStudyReport report;
  report.target = theoretical_rate_exponent(config.alpha, config.beta);
  for (Eigen::Index n : config.sizes) {
    if (n < 2) throw ParameterError("rate study sample sizes must be at least 2");
    const double ratio = static_cast<double>(n) / static_cast<double>(config.n_ref);
    RatePoint point;
    point.n = n;
    point.a = config.a_ref * std::pow(ratio, -ridge_exponent);
    point.h = config.h_ref * std::pow(ratio, -config.gamma);

    McConfig mc;
    mc.n = n;
    mc.reps = config.reps;
    mc.cells = {{point.a, point.h}};
    mc.base_seed = config.base_seed;
    mc.boundary = config.boundary;
    mc.grid = config.grid;
    mc.threads = config.threads;
    const McReport run = run_monte_carlo(mc, dgp);
    point.mise = run.cells.front().mse;
    point.failures = run.cells.front().failures;
    report.points.push_back(point);
  }

  const auto k = static_cast<double>(report.points.size());
  double mx = 0.0, my = 0.0;
  for (const RatePoint& p : report.points) {
    mx += std::log(static_cast<double>(p.n)) / k;
    my += std::log(p.mise) / k;
  }
  double sxx = 0.0, sxy = 0.0;
  for (const RatePoint& p : report.points) {
    const double dx = std::log(static_cast<double>(p.n)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.mise) - my);
  }
  report.slope = sxy / sxx;
  double rss = 0.0;
  for (const RatePoint& p : report.points) {
    const double fitted = my + report.slope * (std::log(static_cast<double>(p.n)) - mx);
    rss += std::pow(std::log(p.mise) - fitted, 2);
  }
  report.slope_stderr = std::sqrt(rss / (k - 2.0) / sxx);
  return report;
}

}  // namespace npiv
