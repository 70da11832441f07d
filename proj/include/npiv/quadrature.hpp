#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace npiv {

enum class GridScheme { GaussLegendre, Trapezoid };

GridScheme parse_grid_scheme(std::string_view name);
std::string_view to_string(GridScheme scheme);

// One-dimensional quadrature rule for Lebesgue measure on [0, 1].
// Nodes are strictly increasing; weights are positive and sum to 1.
struct QuadratureGrid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  GridScheme scheme = GridScheme::GaussLegendre;

  Eigen::Index size() const { return nodes.size(); }

  template <typename F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

// M-point rule on [0, 1]. Gauss-Legendre is exact to degree 2M - 1;
// Trapezoid uses the equispaced nodes k / (M - 1). Throws ParameterError
// for M < 2.
QuadratureGrid build_grid(int size, GridScheme scheme = GridScheme::GaussLegendre);

// Gauss-Legendre rule mapped to [lo, hi] (weights sum to hi - lo).
QuadratureGrid gauss_legendre(int size, double lo, double hi);

// Tensor product of a 1-D rule with itself in `dim` dimensions.
// points: N x dim with N = M^dim, last coordinate varying fastest.
struct TensorGrid {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

TensorGrid tensor_grid(const QuadratureGrid& grid, int dim);

}  // namespace npiv
