#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "npiv/dataset.hpp"
#include "npiv/kernels.hpp"
#include "npiv/quadrature.hpp"

namespace npiv {

// Eigen-pairs of a discretized operator, eigenvalues descending.
// Column j of `functions` holds phi_j on the grid, normalized so that
// sum_l weight_l phi_j(node_l)^2 = 1.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd functions;
};

// Nystrom discretization of the operator (T psi)(z) = integral t(x, z) psi(x) dx
// with t(x, z) = integral f(x, w) f(z, w) dw, together with the factorization of
// the ridged system.
//
// The density enters only through its values on the grid: density(l, q) =
// f(node_l, wnode_q). Then t_hat = F Dw F' and the Nystrom system
// (t_hat Dx + a I) psi = rhs is solved in its symmetric form
//
//   (Dx^1/2 t_hat Dx^1/2 + a I) (Dx^1/2 psi) = Dx^1/2 rhs
//
// by Cholesky. Immutable after construction; solve() is safe to call
// concurrently.
class DiscretizedOperator {
 public:
  DiscretizedOperator(TensorGrid grid, Eigen::VectorXd w_weights,
                      Eigen::MatrixXd density, double ridge);

  const TensorGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& t_hat() const { return t_hat_; }
  const Eigen::MatrixXd& density() const { return density_; }
  const Eigen::VectorXd& w_weights() const { return w_weights_; }
  double ridge() const { return ridge_; }

  // D^1/2 t_hat D^1/2, the matrix whose eigenvalues approximate lambda_j.
  Eigen::MatrixXd symmetrized() const;

  // Solve (T_hat + a I) psi = rhs on the grid, one right-hand side per column.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  // (T_hat psi)(node_m) = sum_l weight_l t_hat(l, m) psi_l.
  Eigen::VectorXd apply(const Eigen::VectorXd& psi) const;

  // ||(T_hat + aI) psi - rhs||_grid / ||rhs||_grid (0 when rhs = 0).
  double relative_residual(const Eigen::VectorXd& psi, const Eigen::VectorXd& rhs) const;

  // Evaluate a solved psi off the grid by the Nystrom extension
  //   psi(x) = (rhs(x) - sum_l weight_l t_hat(node_l, x) psi_l) / a.
  // density_at: rows f(x_e, wnode_q) for the evaluation points;
  // rhs_at: rhs(x_e).
  Eigen::VectorXd extend(const Eigen::MatrixXd& density_at,
                         const Eigen::VectorXd& rhs_at,
                         const Eigen::VectorXd& psi) const;

  Spectrum spectrum() const;

  // Discrete grid norm sqrt(sum_l weight_l v_l^2).
  double grid_norm(const Eigen::VectorXd& values) const;

 private:
  TensorGrid grid_;
  Eigen::VectorXd w_weights_;
  Eigen::MatrixXd density_;
  Eigen::MatrixXd t_hat_;
  Eigen::VectorXd sqrt_weights_;
  double ridge_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

struct OperatorOptions {
  int grid_size = 65;
  int w_grid_size = 0;  // 0: same as grid_size
  GridScheme scheme = GridScheme::GaussLegendre;
};

// Discretize T_hat built from the joint kernel density of (X, W).
// Throws ParameterError for a <= 0.
DiscretizedOperator discretize_operator(const Dataset& data,
                                        const GeneralizedKernel& kernel,
                                        const OperatorOptions& options, double ridge);

// Same construction for a known bivariate density f(x, w) on [0,1]^2.
DiscretizedOperator discretize_density(const std::function<double(double, double)>& density,
                                       const OperatorOptions& options, double ridge);

// t_hat(x, z) = integral f_hat(x, w) f_hat(z, w) dw at arbitrary x, z in [0,1]^p,
// with the w-integral taken on `w_grid`.
double cross_density_integral(const Dataset& data, const GeneralizedKernel& kernel,
                              const QuadratureGrid& w_grid, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z);

// Least-squares slope of log lambda_j on log j over j = first..last (1-based),
// reported as a positive decay exponent. Non-positive eigenvalues are skipped.
double fit_decay_exponent(const Eigen::VectorXd& eigenvalues, int first, int last);

}  // namespace npiv
