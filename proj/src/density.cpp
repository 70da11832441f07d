#include "npiv/density.hpp"

#include <cmath>
#include <vector>

#include "npiv/errors.hpp"

namespace npiv {
namespace {

void check_point(const Eigen::VectorXd& point, Eigen::Index dim, const char* name) {
  if (point.size() != dim)
    throw InputError(std::string(name) + " has dimension " + std::to_string(point.size()) +
                     ", expected " + std::to_string(dim));
}

double product_kernel(const GeneralizedKernel& kernel, const Eigen::VectorXd& query,
                      const Eigen::MatrixXd& samples, Eigen::Index row) {
  double value = 1.0;
  for (Eigen::Index c = 0; c < query.size(); ++c) {
    value *= kernel(query[c] - samples(row, c), query[c]);
    if (value == 0.0) break;
  }
  return value;
}

}  // namespace

Eigen::MatrixXd kernel_matrix(const GeneralizedKernel& kernel, const Eigen::MatrixXd& queries,
                              const Eigen::MatrixXd& samples) {
  if (queries.cols() != samples.cols())
    throw InputError("query and sample dimensions differ");
  const Eigen::Index dim = queries.cols();
  Eigen::MatrixXd out(queries.rows(), samples.rows());
  std::vector<BoundaryCoefficients> coef(dim);
  for (Eigen::Index r = 0; r < queries.rows(); ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) coef[c] = kernel.coefficients(queries(r, c));
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      double value = 1.0;
      for (Eigen::Index c = 0; c < dim && value != 0.0; ++c) {
        const double t = queries(r, c);
        const double u = t - samples(i, c);
        value *= (u > t || u < t - 1.0) ? 0.0 : kernel.eval(u, coef[c]);
      }
      out(r, i) = value;
    }
  }
  return out;
}

double kde_joint(const Dataset& data, const GeneralizedKernel& kernel,
                 const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  check_point(x, data.dim_x(), "x");
  check_point(w, data.dim_x(), "w");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    sum += product_kernel(kernel, x, data.x(), i) * product_kernel(kernel, w, data.w(), i);
  const double h2p = std::pow(kernel.bandwidth(), 2.0 * static_cast<double>(data.dim_x()));
  return sum / (static_cast<double>(data.size()) * h2p);
}

double kde_loo(const Dataset& data, const GeneralizedKernel& kernel, const Eigen::VectorXd& x,
               const Eigen::VectorXd& w, Eigen::Index omit) {
  if (data.size() < 2) throw InputError("leave-one-out density needs n >= 2");
  if (omit < 0 || omit >= data.size()) throw InputError("omitted row out of range");
  check_point(x, data.dim_x(), "x");
  check_point(w, data.dim_x(), "w");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (i == omit) continue;
    sum += product_kernel(kernel, x, data.x(), i) * product_kernel(kernel, w, data.w(), i);
  }
  const double h2p = std::pow(kernel.bandwidth(), 2.0 * static_cast<double>(data.dim_x()));
  return sum / (static_cast<double>(data.size() - 1) * h2p);
}

namespace {

double xzw_sum(const Dataset& data, const GeneralizedKernel& kernel_x,
               const GeneralizedKernel& kernel_z, const Eigen::VectorXd& x,
               const Eigen::VectorXd& z, const Eigen::VectorXd& w, Eigen::Index omit) {
  check_point(x, data.dim_x(), "x");
  check_point(w, data.dim_x(), "w");
  check_point(z, data.dim_z(), "z");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (i == omit) continue;
    sum += product_kernel(kernel_x, x, data.x(), i) * product_kernel(kernel_z, z, data.z(), i) *
           product_kernel(kernel_x, w, data.w(), i);
  }
  return sum;
}

double xzw_scale(const Dataset& data, const GeneralizedKernel& kernel_x,
                 const GeneralizedKernel& kernel_z) {
  return std::pow(kernel_x.bandwidth(), 2.0 * static_cast<double>(data.dim_x())) *
         std::pow(kernel_z.bandwidth(), static_cast<double>(data.dim_z()));
}

}  // namespace

double kde_joint_xzw(const Dataset& data, const GeneralizedKernel& kernel_x,
                     const GeneralizedKernel& kernel_z, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& z, const Eigen::VectorXd& w) {
  if (!data.has_z()) throw InputError("dataset has no exogenous covariates");
  return xzw_sum(data, kernel_x, kernel_z, x, z, w, -1) /
         (static_cast<double>(data.size()) * xzw_scale(data, kernel_x, kernel_z));
}

double kde_loo_xzw(const Dataset& data, const GeneralizedKernel& kernel_x,
                   const GeneralizedKernel& kernel_z, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z, const Eigen::VectorXd& w, Eigen::Index omit) {
  if (!data.has_z()) throw InputError("dataset has no exogenous covariates");
  if (data.size() < 2) throw InputError("leave-one-out density needs n >= 2");
  if (omit < 0 || omit >= data.size()) throw InputError("omitted row out of range");
  return xzw_sum(data, kernel_x, kernel_z, x, z, w, omit) /
         (static_cast<double>(data.size() - 1) * xzw_scale(data, kernel_x, kernel_z));
}

}  // namespace npiv
