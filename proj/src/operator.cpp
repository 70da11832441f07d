#include "npiv/operator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "npiv/density.hpp"
#include "npiv/errors.hpp"

namespace npiv {
namespace {

void check_ridge(double ridge) {
  if (!(ridge > 0.0) || !std::isfinite(ridge))
    throw ParameterError("ridge parameter a must be positive, got " + std::to_string(ridge));
}

QuadratureGrid w_rule(const OperatorOptions& options) {
  return build_grid(options.w_grid_size > 0 ? options.w_grid_size : options.grid_size,
                    options.scheme);
}

}  // namespace

DiscretizedOperator::DiscretizedOperator(TensorGrid grid, Eigen::VectorXd w_weights,
                                         Eigen::MatrixXd density, double ridge)
    : grid_(std::move(grid)),
      w_weights_(std::move(w_weights)),
      density_(std::move(density)),
      ridge_(ridge) {
  check_ridge(ridge);
  if (density_.rows() != grid_.size() || density_.cols() != w_weights_.size())
    throw InputError("density matrix must be (grid nodes) x (w nodes)");

  const Eigen::MatrixXd scaled = density_ * w_weights_.cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd gram = scaled * scaled.transpose();
  // Exact symmetry: (a + b) == (b + a) in floating point.
  t_hat_ = 0.5 * (gram + gram.transpose());

  sqrt_weights_ = grid_.weights.cwiseSqrt();
  Eigen::MatrixXd system = symmetrized();
  system.diagonal().array() += ridge_;
  factor_.compute(system);
  if (factor_.info() != Eigen::Success)
    throw NumericalError("Cholesky factorization of the ridged operator failed");
}

Eigen::MatrixXd DiscretizedOperator::symmetrized() const {
  return sqrt_weights_.asDiagonal() * t_hat_ * sqrt_weights_.asDiagonal();
}

Eigen::MatrixXd DiscretizedOperator::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != grid_.size())
    throw InputError("right-hand side has " + std::to_string(rhs.rows()) + " rows, expected " +
                     std::to_string(grid_.size()));
  const Eigen::MatrixXd scaled = sqrt_weights_.asDiagonal() * rhs;
  return sqrt_weights_.cwiseInverse().asDiagonal() * factor_.solve(scaled);
}

Eigen::VectorXd DiscretizedOperator::solve(const Eigen::VectorXd& rhs) const {
  return solve(Eigen::MatrixXd(rhs)).col(0);
}

Eigen::VectorXd DiscretizedOperator::apply(const Eigen::VectorXd& psi) const {
  if (psi.size() != grid_.size()) throw InputError("function length does not match grid");
  return t_hat_ * grid_.weights.cwiseProduct(psi);
}

double DiscretizedOperator::grid_norm(const Eigen::VectorXd& values) const {
  return std::sqrt(grid_.weights.dot(values.cwiseAbs2()));
}

double DiscretizedOperator::relative_residual(const Eigen::VectorXd& psi,
                                              const Eigen::VectorXd& rhs) const {
  const double denom = grid_norm(rhs);
  const Eigen::VectorXd residual = apply(psi) + ridge_ * psi - rhs;
  return denom == 0.0 ? grid_norm(residual) : grid_norm(residual) / denom;
}

Eigen::VectorXd DiscretizedOperator::extend(const Eigen::MatrixXd& density_at,
                                            const Eigen::VectorXd& rhs_at,
                                            const Eigen::VectorXd& psi) const {
  if (density_at.cols() != w_weights_.size() || density_at.rows() != rhs_at.size())
    throw InputError("evaluation density rows do not match the w grid");
  // t_hat(node_l, x_e) for every evaluation point e.
  const Eigen::MatrixXd cross = density_at * w_weights_.asDiagonal() * density_.transpose();
  return (rhs_at - cross * grid_.weights.cwiseProduct(psi)) / ridge_;
}

Spectrum DiscretizedOperator::spectrum() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized());
  if (solver.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
  Spectrum out;
  out.values = solver.eigenvalues().reverse();
  out.functions = sqrt_weights_.cwiseInverse().asDiagonal() * solver.eigenvectors().rowwise().reverse();
  return out;
}

DiscretizedOperator discretize_operator(const Dataset& data, const GeneralizedKernel& kernel,
                                        const OperatorOptions& options, double ridge) {
  check_ridge(ridge);
  const Dataset sorted = data.canonical();
  const int dim = static_cast<int>(sorted.dim_x());
  TensorGrid x_grid = tensor_grid(build_grid(options.grid_size, options.scheme), dim);
  const TensorGrid w_grid = tensor_grid(w_rule(options), dim);

  const Eigen::MatrixXd kx = kernel_matrix(kernel, x_grid.points, sorted.x());
  const Eigen::MatrixXd kw = kernel_matrix(kernel, w_grid.points, sorted.w());
  const double scale = static_cast<double>(sorted.size()) *
                       std::pow(kernel.bandwidth(), 2.0 * static_cast<double>(dim));
  Eigen::MatrixXd density = kx * kw.transpose() / scale;
  return DiscretizedOperator(std::move(x_grid), w_grid.weights, std::move(density), ridge);
}

DiscretizedOperator discretize_density(const std::function<double(double, double)>& density,
                                       const OperatorOptions& options, double ridge) {
  check_ridge(ridge);
  const QuadratureGrid x_rule = build_grid(options.grid_size, options.scheme);
  const QuadratureGrid w = w_rule(options);
  Eigen::MatrixXd values(x_rule.size(), w.size());
  for (Eigen::Index l = 0; l < x_rule.size(); ++l)
    for (Eigen::Index q = 0; q < w.size(); ++q) values(l, q) = density(x_rule.nodes[l], w.nodes[q]);
  return DiscretizedOperator(tensor_grid(x_rule, 1), w.weights, std::move(values), ridge);
}

double cross_density_integral(const Dataset& data, const GeneralizedKernel& kernel,
                              const QuadratureGrid& w_grid, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z) {
  const int dim = static_cast<int>(data.dim_x());
  if (x.size() != dim || z.size() != dim) throw InputError("point dimension mismatch");
  const TensorGrid w = tensor_grid(w_grid, dim);
  Eigen::MatrixXd points(2, dim);
  points.row(0) = x.transpose();
  points.row(1) = z.transpose();
  const Eigen::MatrixXd kx = kernel_matrix(kernel, points, data.x());
  const Eigen::MatrixXd kw = kernel_matrix(kernel, w.points, data.w());
  const double scale = static_cast<double>(data.size()) *
                       std::pow(kernel.bandwidth(), 2.0 * static_cast<double>(dim));
  const Eigen::MatrixXd f = kx * kw.transpose() / scale;  // 2 x Nw
  return (f.row(0).transpose().cwiseProduct(w.weights)).dot(f.row(1).transpose());
}

double fit_decay_exponent(const Eigen::VectorXd& eigenvalues, int first, int last) {
  if (first < 1 || last > eigenvalues.size() || last - first < 1)
    throw ParameterError("decay fit needs an index range of at least two eigenvalues");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int j = first; j <= last; ++j) {
    const double lambda = eigenvalues[j - 1];
    if (!(lambda > 0.0)) continue;
    const double lx = std::log(static_cast<double>(j));
    const double ly = std::log(lambda);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) throw NumericalError("fewer than two positive eigenvalues in the decay fit");
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return -slope;
}

}  // namespace npiv
