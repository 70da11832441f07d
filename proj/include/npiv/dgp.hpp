#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>

#include "npiv/dataset.hpp"

namespace npiv {

struct DgpSpec {
  int j_max = 100;       // series truncation
  double sigma_v = 0.1;  // standard deviation of V
  int table_size = 1024; // sampling table resolution per axis
};

// Inverse-CDF sampling table for the clamped, renormalized density.
struct SamplingTable {
  int size = 0;
  Eigen::VectorXd x_cdf;    // size + 1 entries, x_cdf[0] = 0, last = 1
  Eigen::MatrixXd w_cdf;    // column k: conditional CDF of W in x-cell k, size + 1 entries
  double clamped_mass = 0;  // mass removed by clamping negative values
};

// The simulation design
//
//   f_XW(x, w) = 2 C_f sum_j (-1)^(j+1) j^-1 sin(j pi x) sin(j pi w),
//   g(x)       = sqrt(2) sum_j (-1)^(j+1) j^-2 sin(j pi x),
//   Y          = E{g(X) | W} + V,  V ~ N(0, sigma_v^2),
//
// with all series truncated at j_max. In the eigenbasis phi_j = sqrt(2) sin(j pi x)
// the operator T is diagonal with lambda_j = C_f^2 j^-2.
class Dgp {
 public:
  explicit Dgp(DgpSpec spec = {});

  const DgpSpec& spec() const { return spec_; }
  double c_f() const { return c_f_; }

  double density(double x, double w) const;
  double g_true(double x) const;
  // f_X; identical to f_W by symmetry of the density.
  double marginal(double x) const;
  // F_X(x) = integral_0^x f_X.
  double marginal_cdf(double x) const;
  // E{g(X) | W = w}. Throws DomainError where f_W(w) < 1e-12.
  double cond_mean(double w) const;
  // sum_j C_f^2 j^-2 phi_j(x) phi_j(z).
  double t_true(double x, double z) const;
  // lambda_j = C_f^2 j^-2, j >= 1.
  double eigenvalue(int j) const;

  // Draw (X, W) from the tabulated density by inverse CDF (X from the
  // marginal, W from its conditional in X's cell, linear within cells),
  // then Y = cond_mean(W) + V. Fully determined by `seed`.
  Dataset sample(Eigen::Index n, std::uint64_t seed) const;

  const SamplingTable& table() const;

 private:
  struct TableCache;

  DgpSpec spec_;
  double c_f_;
  // Built on first use; shared by copies.
  std::shared_ptr<TableCache> cache_;
};

}  // namespace npiv
