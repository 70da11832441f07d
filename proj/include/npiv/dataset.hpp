#pragma once

#include <Eigen/Dense>
#include <optional>

namespace npiv {

// n observations of (X, W, Y) with X, W in [0,1]^p and optional exogenous
// Z in [0,1]^q. Rows index observations.
class Dataset {
 public:
  // Throws InputError unless all arrays share n >= 1 rows, x and w share p
  // columns, and every coordinate is finite with x, w, z inside [0, 1].
  Dataset(Eigen::MatrixXd x, Eigen::MatrixXd w, Eigen::VectorXd y,
          std::optional<Eigen::MatrixXd> z = std::nullopt);

  // Convenience for the scalar case p = 1.
  static Dataset scalar(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& y);

  Eigen::Index size() const { return y_.size(); }
  Eigen::Index dim_x() const { return x_.cols(); }
  Eigen::Index dim_z() const { return z_ ? z_->cols() : 0; }
  bool has_z() const { return z_.has_value(); }

  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::MatrixXd& w() const { return w_; }
  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::MatrixXd& z() const;

  Dataset with_y(Eigen::VectorXd y) const;
  Dataset without(Eigen::Index row) const;
  Dataset permuted(const Eigen::VectorXi& order) const;

  // Rows sorted lexicographically by (x, w, z, y). Estimators work on this
  // ordering so that results do not depend on how the input rows were listed.
  Dataset canonical() const;

 private:
  Eigen::MatrixXd x_;
  Eigen::MatrixXd w_;
  Eigen::VectorXd y_;
  std::optional<Eigen::MatrixXd> z_;
};

}  // namespace npiv
