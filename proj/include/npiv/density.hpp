#pragma once

#include <Eigen/Dense>

#include "npiv/dataset.hpp"
#include "npiv/kernels.hpp"

namespace npiv {

// Product-kernel weights: entry (r, i) is prod_c K_h(query(r,c) - sample(i,c), query(r,c)).
// Queries must lie in [0,1]; throws DomainError otherwise.
Eigen::MatrixXd kernel_matrix(const GeneralizedKernel& kernel,
                              const Eigen::MatrixXd& queries,
                              const Eigen::MatrixXd& samples);

// f_XW(x, w) = (n h^2p)^-1 sum_i K_h(x - X_i, x) K_h(w - W_i, w).
// Not clamped: boundary kernels can make it negative.
double kde_joint(const Dataset& data, const GeneralizedKernel& kernel,
                 const Eigen::VectorXd& x, const Eigen::VectorXd& w);

// Leave-one-out version omitting row `omit`, divisor (n - 1) h^2p.
// Throws InputError when n < 2 and for an invalid row.
double kde_loo(const Dataset& data, const GeneralizedKernel& kernel,
               const Eigen::VectorXd& x, const Eigen::VectorXd& w,
               Eigen::Index omit);

// f_XZW(x, z, w) = (n hx^2p hz^q)^-1 sum_i K(x) K(z) K(w) for data with Z.
double kde_joint_xzw(const Dataset& data, const GeneralizedKernel& kernel_x,
                     const GeneralizedKernel& kernel_z, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& z, const Eigen::VectorXd& w);

double kde_loo_xzw(const Dataset& data, const GeneralizedKernel& kernel_x,
                   const GeneralizedKernel& kernel_z, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z, const Eigen::VectorXd& w,
                   Eigen::Index omit);

}  // namespace npiv
