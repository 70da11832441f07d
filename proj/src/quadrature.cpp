#include "npiv/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "npiv/errors.hpp"

namespace npiv {

GridScheme parse_grid_scheme(std::string_view name) {
  if (name == "gauss" || name == "gauss-legendre") return GridScheme::GaussLegendre;
  if (name == "trapezoid") return GridScheme::Trapezoid;
  throw ParameterError("unknown grid scheme '" + std::string(name) + "'");
}

std::string_view to_string(GridScheme scheme) {
  return scheme == GridScheme::GaussLegendre ? "gauss-legendre" : "trapezoid";
}

QuadratureGrid gauss_legendre(int size, double lo, double hi) {
  if (size < 1) throw ParameterError("Gauss-Legendre rule needs at least one node");
  QuadratureGrid grid;
  grid.scheme = GridScheme::GaussLegendre;
  grid.nodes.resize(size);
  grid.weights.resize(size);
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  const int roots = (size + 1) / 2;
  for (int i = 0; i < roots; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (size + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int k = 1; k <= size; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
      }
      dp = size * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int k = 1; k <= size; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
      }
      dp = size * (z * p1 - p2) / (z * z - 1.0);
    }
    const double weight = 2.0 * half / ((1.0 - z * z) * dp * dp);
    grid.nodes[i] = mid - half * z;
    grid.nodes[size - 1 - i] = mid + half * z;
    grid.weights[i] = weight;
    grid.weights[size - 1 - i] = weight;
  }
  if (size % 2 == 1) grid.nodes[size / 2] = mid;
  return grid;
}

QuadratureGrid build_grid(int size, GridScheme scheme) {
  if (size < 2) throw ParameterError("quadrature grid needs M >= 2, got " + std::to_string(size));
  if (scheme == GridScheme::GaussLegendre) return gauss_legendre(size, 0.0, 1.0);

  QuadratureGrid grid;
  grid.scheme = GridScheme::Trapezoid;
  grid.nodes.resize(size);
  grid.weights.resize(size);
  const double step = 1.0 / (size - 1);
  for (int k = 0; k < size; ++k) {
    grid.nodes[k] = k == size - 1 ? 1.0 : k * step;
    grid.weights[k] = step;
  }
  grid.weights[0] = grid.weights[size - 1] = 0.5 * step;
  return grid;
}

TensorGrid tensor_grid(const QuadratureGrid& grid, int dim) {
  if (dim < 1) throw ParameterError("tensor grid dimension must be positive");
  const Eigen::Index m = grid.size();
  Eigen::Index total = 1;
  for (int d = 0; d < dim; ++d) total *= m;

  TensorGrid out;
  out.points.resize(total, dim);
  out.weights.resize(total);
  for (Eigen::Index r = 0; r < total; ++r) {
    Eigen::Index rest = r;
    double weight = 1.0;
    for (int d = dim - 1; d >= 0; --d) {
      const Eigen::Index k = rest % m;
      rest /= m;
      out.points(r, d) = grid.nodes[k];
      weight *= grid.weights[k];
    }
    out.weights[r] = weight;
  }
  return out;
}

}  // namespace npiv
