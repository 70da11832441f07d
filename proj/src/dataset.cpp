#include "npiv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "npiv/errors.hpp"

namespace npiv {
namespace {

void check_unit(const Eigen::MatrixXd& m, const char* name) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(i, c);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw InputError(std::string(name) + " value at row " + std::to_string(i + 1) +
                         " is not a finite number in [0, 1]");
    }
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = m.row(rows[r]);
  return out;
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd x, Eigen::MatrixXd w, Eigen::VectorXd y,
                 std::optional<Eigen::MatrixXd> z)
    : x_(std::move(x)), w_(std::move(w)), y_(std::move(y)), z_(std::move(z)) {
  const Eigen::Index n = y_.size();
  if (n < 1) throw InputError("dataset is empty");
  if (x_.rows() != n || w_.rows() != n || (z_ && z_->rows() != n))
    throw InputError("x, w, y (and z) must have the same number of observations");
  if (x_.cols() < 1 || x_.cols() != w_.cols())
    throw InputError("x and w must have the same positive dimension");
  if (z_ && z_->cols() < 1) throw InputError("z must have at least one column");
  check_unit(x_, "x");
  check_unit(w_, "w");
  if (z_) check_unit(*z_, "z");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(y_[i]))
      throw InputError("y value at row " + std::to_string(i + 1) + " is not finite");
}

Dataset Dataset::scalar(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& y) {
  return Dataset(Eigen::MatrixXd(x), Eigen::MatrixXd(w), y);
}

const Eigen::MatrixXd& Dataset::z() const {
  if (!z_) throw InputError("dataset has no exogenous covariates");
  return *z_;
}

Dataset Dataset::with_y(Eigen::VectorXd y) const { return Dataset(x_, w_, std::move(y), z_); }

Dataset Dataset::without(Eigen::Index row) const {
  if (row < 0 || row >= size()) throw InputError("row index out of range");
  if (size() < 2) throw InputError("cannot remove the only observation");
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < size(); ++i)
    if (i != row) rows.push_back(i);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) y[r] = y_[rows[r]];
  return Dataset(take_rows(x_, rows), take_rows(w_, rows), std::move(y),
                 z_ ? std::optional(take_rows(*z_, rows)) : std::nullopt);
}

Dataset Dataset::permuted(const Eigen::VectorXi& order) const {
  if (order.size() != size()) throw InputError("permutation length does not match dataset");
  std::vector<Eigen::Index> rows(order.data(), order.data() + order.size());
  std::vector<bool> seen(rows.size(), false);
  for (Eigen::Index r : rows) {
    if (r < 0 || r >= size() || seen[r]) throw InputError("not a permutation");
    seen[r] = true;
  }
  Eigen::VectorXd y(size());
  for (std::size_t r = 0; r < rows.size(); ++r) y[r] = y_[rows[r]];
  return Dataset(take_rows(x_, rows), take_rows(w_, rows), std::move(y),
                 z_ ? std::optional(take_rows(*z_, rows)) : std::nullopt);
}

Dataset Dataset::canonical() const {
  Eigen::VectorXi order(size());
  std::iota(order.begin(), order.end(), 0);
  auto key_less = [&](int a, int b) {
    auto cmp_rows = [&](const Eigen::MatrixXd& m) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (m(a, c) < m(b, c)) return -1;
        if (m(a, c) > m(b, c)) return 1;
      }
      return 0;
    };
    if (int c = cmp_rows(x_)) return c < 0;
    if (int c = cmp_rows(w_)) return c < 0;
    if (z_)
      if (int c = cmp_rows(*z_)) return c < 0;
    return y_[a] < y_[b];
  };
  std::stable_sort(order.begin(), order.end(), key_less);
  return permuted(order);
}

}  // namespace npiv
