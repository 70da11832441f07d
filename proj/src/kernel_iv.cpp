#include "npiv/kernel_iv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "npiv/density.hpp"
#include "npiv/errors.hpp"

namespace npiv {
namespace {

void check_config(const KernelIvConfig& config) {
  if (!(config.a > 0.0) || !std::isfinite(config.a))
    throw ParameterError("ridge parameter a must be positive, got " + std::to_string(config.a));
  if (!(config.h > 0.0) || !std::isfinite(config.h))
    throw ParameterError("bandwidth h must be positive, got " + std::to_string(config.h));
  if (config.grid.grid_size < 2) throw ParameterError("grid size must be at least 2");
}

Eigen::MatrixXd resolve_eval_points(const KernelIvConfig& config, Eigen::Index dim) {
  Eigen::MatrixXd points = config.eval_points;
  if (points.size() == 0) {
    if (dim != 1) throw ParameterError("evaluation points are required when p > 1");
    points = default_eval_points();
  }
  if (points.cols() != dim)
    throw ParameterError("evaluation points have dimension " + std::to_string(points.cols()) +
                         ", expected " + std::to_string(dim));
  for (Eigen::Index r = 0; r < points.rows(); ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      if (!(points(r, c) >= 0.0 && points(r, c) <= 1.0))
        throw DomainError("evaluation point " + std::to_string(r + 1) + " lies outside [0, 1]");
  return points;
}

QuadratureGrid w_rule(const OperatorOptions& options) {
  return build_grid(options.w_grid_size > 0 ? options.w_grid_size : options.grid_size,
                    options.scheme);
}

// Shared pipeline. Observation i carries localization weight c_i (1 in the
// bivariate case) and z_scale = hz^q (1 in the bivariate case). Because the
// estimator is linear in the right-hand side, the n leave-one-out solves
// collapse into one solve with the Y-weighted average right-hand side
//
//   r(x) = sum_j A(x, j) v_j,
//   v_j  = c_j sum_{i != j} Y_i c_i K(W_i - W_j, W_i) / (n (n-1) h^2p z_scale^2).
Estimate estimate_core(const Dataset& data, const KernelIvConfig& config,
                       const Eigen::VectorXd& locality, double z_scale) {
  const Eigen::Index n = data.size();
  const int dim = static_cast<int>(data.dim_x());
  const Eigen::MatrixXd eval_points = resolve_eval_points(config, dim);
  const GeneralizedKernel kernel(BaseKernel(config.kernel), config.boundary, config.h);

  TensorGrid x_grid = tensor_grid(build_grid(config.grid.grid_size, config.grid.scheme), dim);
  const TensorGrid w_grid = tensor_grid(w_rule(config.grid), dim);

  const Eigen::MatrixXd kx = kernel_matrix(kernel, x_grid.points, data.x());
  const Eigen::MatrixXd kw = kernel_matrix(kernel, w_grid.points, data.w());
  const double h2p = std::pow(config.h, 2.0 * dim);
  const double density_scale = static_cast<double>(n) * h2p * z_scale;
  Eigen::MatrixXd density = kx * locality.asDiagonal() * kw.transpose() / density_scale;

  const DiscretizedOperator op(std::move(x_grid), w_grid.weights, std::move(density), config.a);

  // kww(i, j) = K(W_i - W_j, W_i).
  const Eigen::MatrixXd kww = kernel_matrix(kernel, data.w(), data.w());
  const double rhs_scale =
      static_cast<double>(n) * static_cast<double>(n - 1) * h2p * z_scale * z_scale;
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0.0;
    if (locality[j] != 0.0)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) sum += data.y()[i] * locality[i] * kww(i, j);
    v[j] = locality[j] * sum / rhs_scale;
  }

  const Eigen::VectorXd rhs = kx * v;
  const Eigen::VectorXd psi = op.solve(rhs);

  const Eigen::MatrixXd ke = kernel_matrix(kernel, eval_points, data.x());
  const Eigen::MatrixXd density_at = ke * locality.asDiagonal() * kw.transpose() / density_scale;
  const Eigen::VectorXd rhs_at = ke * v;

  Estimate out;
  out.points = eval_points;
  out.values = op.extend(density_at, rhs_at, psi);
  out.diagnostics.ridge = config.a;
  out.diagnostics.bandwidth = config.h;
  if (config.spectrum_diagnostics) {
    const Spectrum spectrum = op.spectrum();
    const Eigen::Index keep = std::min<Eigen::Index>(10, spectrum.values.size());
    for (Eigen::Index j = 0; j < keep; ++j)
      out.diagnostics.leading_eigenvalues.push_back(spectrum.values[j]);
    for (Eigen::Index j = 0; j < spectrum.values.size(); ++j) {
      const double lambda = std::max(0.0, spectrum.values[j]);
      out.diagnostics.effective_dof += lambda / (lambda + config.a);
    }
  }
  for (Eigen::Index e = 0; e < out.values.size(); ++e)
    if (!std::isfinite(out.values[e])) throw NumericalError("non-finite estimate");
  return out;
}

}  // namespace

Eigen::MatrixXd default_eval_points() {
  Eigen::MatrixXd points(19, 1);
  for (int j = 0; j < 19; ++j) points(j, 0) = (j + 1) / 20.0;
  return points;
}

Estimate estimate_bivariate(const Dataset& data, const KernelIvConfig& config) {
  check_config(config);
  if (data.has_z())
    throw InputError("dataset has exogenous covariates; use the multivariate estimator");
  if (data.size() < 2) throw InputError("estimation needs n >= 2");
  const Dataset sorted = data.canonical();
  return estimate_core(sorted, config, Eigen::VectorXd::Ones(sorted.size()), 1.0);
}

Estimate estimate_multivariate(const Dataset& data, const KernelIvConfig& config,
                               const Eigen::VectorXd& z0) {
  check_config(config);
  if (!(config.h_z > 0.0) || !std::isfinite(config.h_z))
    throw ParameterError("bandwidth h_z must be positive, got " + std::to_string(config.h_z));
  if (!data.has_z()) throw InputError("multivariate estimation needs exogenous covariates z");
  if (data.size() < 2) throw InputError("estimation needs n >= 2");
  if (z0.size() != data.dim_z())
    throw ParameterError("z0 has dimension " + std::to_string(z0.size()) + ", expected " +
                         std::to_string(data.dim_z()));
  for (Eigen::Index c = 0; c < z0.size(); ++c)
    if (!(z0[c] >= 0.0 && z0[c] <= 1.0)) throw DomainError("z0 lies outside [0, 1]");

  const Dataset sorted = data.canonical();
  const GeneralizedKernel kernel_z(BaseKernel(config.kernel), config.boundary, config.h_z);
  const Eigen::MatrixXd locality = kernel_matrix(kernel_z, z0.transpose(), sorted.z());
  const double z_scale = std::pow(config.h_z, static_cast<double>(sorted.dim_z()));

  Estimate out = estimate_core(sorted, config, locality.row(0).transpose(), z_scale);
  out.diagnostics.bandwidth_z = config.h_z;
  out.diagnostics.sparse_locality = (locality.array() == 0.0).all();
  return out;
}

Eigen::VectorXd estimation_band(const Eigen::MatrixXd& replicates, const Eigen::VectorXd& truth,
                                double level) {
  if (!(level > 0.0 && level <= 1.0))
    throw ParameterError("band level must lie in (0, 1]");
  if (replicates.rows() < 2) throw ParameterError("estimation band needs at least 2 replications");
  if (replicates.cols() != truth.size())
    throw InputError("truth has " + std::to_string(truth.size()) + " points, replicates have " +
                     std::to_string(replicates.cols()));
  const Eigen::Index reps = replicates.rows();
  const auto needed = static_cast<Eigen::Index>(std::ceil(level * static_cast<double>(reps) - 1e-9));
  const Eigen::Index k = std::clamp<Eigen::Index>(needed, 1, reps) - 1;
  Eigen::VectorXd out(truth.size());
  std::vector<double> deviations(reps);
  for (Eigen::Index j = 0; j < truth.size(); ++j) {
    for (Eigen::Index r = 0; r < reps; ++r) deviations[r] = std::abs(replicates(r, j) - truth[j]);
    std::nth_element(deviations.begin(), deviations.begin() + k, deviations.end());
    out[j] = deviations[k];
  }
  return out;
}

Eigen::VectorXd estimation_band(const std::vector<Estimate>& replicates,
                                const Eigen::VectorXd& truth, double level) {
  if (replicates.empty()) throw ParameterError("estimation band needs at least 2 replications");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(replicates.size()), truth.size());
  for (std::size_t r = 0; r < replicates.size(); ++r) {
    if (replicates[r].values.size() != truth.size())
      throw InputError("replicate " + std::to_string(r) + " has the wrong number of points");
    values.row(static_cast<Eigen::Index>(r)) = replicates[r].values.transpose();
  }
  return estimation_band(values, truth, level);
}

}  // namespace npiv
