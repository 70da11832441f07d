#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "npiv/dgp.hpp"
#include "npiv/kernels.hpp"
#include "npiv/operator.hpp"

namespace npiv {

enum class EstimatorKind { Kernel, Series };

EstimatorKind parse_estimator(std::string_view name);
std::string_view to_string(EstimatorKind kind);

struct McCell {
  double a = 0.1;
  double h = 0.2;  // ignored by the series estimator
};

struct McConfig {
  Eigen::Index n = 200;
  int reps = 1000;
  std::vector<McCell> cells;  // empty: the default 4x4 (a, h) grid
  Eigen::VectorXd eval_points;  // empty: 0.05, 0.10, ..., 0.95
  EstimatorKind estimator = EstimatorKind::Kernel;
  std::uint64_t base_seed = 20050101;
  // Kernel estimator settings.
  BoundaryPolicy boundary = BoundaryPolicy::Plain;
  KernelFamily kernel = KernelFamily::Epanechnikov;
  OperatorOptions grid;
  // Series estimator settings (0: defaults from n).
  int series_m = 0;
  int series_band = 0;
  double band_level = 0.95;
  int threads = 1;
};

// a in {0.05, 0.10, 0.15, 0.20} x h in {0.1, 0.2, 0.3, 0.4}.
std::vector<McCell> default_cells();

struct McCellReport {
  McCell cell;
  double bias2 = 0.0;  // averages over the evaluation points
  double var = 0.0;
  double mse = 0.0;
  Eigen::VectorXd mean;  // per point
  Eigen::VectorXd point_bias2;
  Eigen::VectorXd point_var;
  Eigen::VectorXd point_mse;
  Eigen::VectorXd band;  // half-widths at band_level
  int failures = 0;
  std::vector<std::string> failure_messages;  // first few, by replication index
  bool flagged() const { return failures > 0; }
};

struct McReport {
  McConfig config;
  Eigen::VectorXd eval_points;
  Eigen::VectorXd truth;
  std::vector<McCellReport> cells;
  std::string config_hash;  // FNV-1a of the canonical configuration text
};

// Replication r draws its dataset with seed base_seed + r; every cell is
// evaluated on the same draws. Variance uses divisor reps, so
// MSE = Bias^2 + Var pointwise. Results do not depend on `threads`.
McReport run_monte_carlo(const McConfig& config, const Dgp& dgp);

// Per-replication estimates for one cell (rows: replications). Failed
// replications are rows of NaN.
Eigen::MatrixXd replicate_estimates(const McConfig& config, const McCell& cell,
                                    const Dgp& dgp);

struct RateStudyConfig {
  std::vector<Eigen::Index> sizes{100, 200, 400, 800};
  int reps = 300;
  std::uint64_t base_seed = 20050101;
  // a(n) = a_ref (n / n_ref)^-alpha/(2beta+alpha), h(n) = h_ref (n / n_ref)^-gamma.
  double alpha = 2.0;
  double beta = 2.0;
  double gamma = 7.0 / 24.0;
  Eigen::Index n_ref = 200;
  double a_ref = 0.10;
  double h_ref = 0.30;
  BoundaryPolicy boundary = BoundaryPolicy::Plain;
  OperatorOptions grid;
  int threads = 1;
};

struct RatePoint {
  Eigen::Index n = 0;
  double a = 0.0;
  double h = 0.0;
  double mise = 0.0;
  int failures = 0;
};

struct RateStudyReport {
  std::vector<RatePoint> points;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double target = 0.0;  // -(2beta - 1) / (2beta + alpha)
};

// MISE is the average pointwise MSE over the 19 default evaluation points;
// the slope is the least-squares fit of log MISE on log n. Throws
// ParameterError with fewer than 3 sizes.
RateStudyReport rate_study(const RateStudyConfig& config, const Dgp& dgp);

double theoretical_rate_exponent(double alpha, double beta);

std::string fnv1a_hex(const std::string& text);

}  // namespace npiv
