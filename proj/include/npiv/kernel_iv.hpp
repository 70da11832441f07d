#pragma once

#include <Eigen/Dense>
#include <vector>

#include "npiv/dataset.hpp"
#include "npiv/kernels.hpp"
#include "npiv/operator.hpp"

namespace npiv {

struct KernelIvConfig {
  double h = 0.2;    // bandwidth for X and W (h_x in the multivariate case)
  double h_z = 0.2;  // bandwidth for Z
  double a = 0.1;    // ridge
  OperatorOptions grid;
  KernelFamily kernel = KernelFamily::Epanechnikov;
  BoundaryPolicy boundary = BoundaryPolicy::Plain;
  // Evaluation points, one per row, in [0,1]^p.
  Eigen::MatrixXd eval_points;
  // Leading eigenvalues and effective degrees of freedom in the diagnostics.
  bool spectrum_diagnostics = true;
};

struct EstimateDiagnostics {
  double ridge = 0.0;
  double bandwidth = 0.0;
  double bandwidth_z = 0.0;
  std::vector<double> leading_eigenvalues;  // at most 10
  double effective_dof = 0.0;               // sum lambda / (lambda + a)
  // Multivariate: no Z_i within bandwidth of z0.
  bool sparse_locality = false;
  // Series: more basis terms than observations.
  bool ill_determined = false;
};

struct Estimate {
  Eigen::MatrixXd points;
  Eigen::VectorXd values;
  EstimateDiagnostics diagnostics;
};

// The 19 points 0.05, 0.10, ..., 0.95 as a column.
Eigen::MatrixXd default_eval_points();

// g_hat(x) = n^-1 sum_i (T_hat^+ f_hat^(-i)(., W_i))(x) Y_i for X, W in [0,1]^p.
// Requires a dataset without Z and n >= 2.
Estimate estimate_bivariate(const Dataset& data, const KernelIvConfig& config);

// g_hat(x, z0) = n^-1 hz^-q sum_i (T_z0^+ f_hat^(-i)(., z0, W_i))(x) Y_i K_hz(z0 - Z_i, z0)
// with T_z0 assembled from f_hat_XZW(., z0, .). Requires Z and n >= 2.
Estimate estimate_multivariate(const Dataset& data, const KernelIvConfig& config,
                               const Eigen::VectorXd& z0);

// Pointwise half-widths delta_j: the smallest delta with at least `level` of
// the replicated values inside [g_j - delta, g_j + delta].
// replicates: one row per replication, one column per point.
Eigen::VectorXd estimation_band(const Eigen::MatrixXd& replicates,
                                const Eigen::VectorXd& truth, double level);
Eigen::VectorXd estimation_band(const std::vector<Estimate>& replicates,
                                const Eigen::VectorXd& truth, double level);

}  // namespace npiv
