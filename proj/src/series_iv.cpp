#include "npiv/series_iv.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "npiv/errors.hpp"

namespace npiv {
namespace {

// n x m matrix of chi_k(values_i).
Eigen::MatrixXd basis_matrix(const Eigen::VectorXd& values, int m) {
  Eigen::MatrixXd out(values.size(), m);
  for (Eigen::Index i = 0; i < values.size(); ++i)
    for (int k = 1; k <= m; ++k) out(i, k - 1) = cosine_eval(k, values[i]);
  return out;
}

}  // namespace

Eigen::VectorXd ecdf_transform(const Eigen::VectorXd& samples) {
  const Eigen::Index n = samples.size();
  if (n < 1) throw InputError("empirical CDF of an empty sample");
  std::vector<double> sorted(samples.data(), samples.data() + n);
  for (double s : sorted)
    if (!std::isfinite(s)) throw InputError("empirical CDF input is not finite");
  std::sort(sorted.begin(), sorted.end());
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto rank = std::upper_bound(sorted.begin(), sorted.end(), samples[i]) - sorted.begin();
    out[i] = static_cast<double>(rank) / static_cast<double>(n);
  }
  return out;
}

double cosine_eval(int j, double x) {
  if (j < 1) throw ParameterError("cosine basis index starts at 1");
  if (j == 1) return 1.0;
  return std::numbers::sqrt2 * std::cos((j - 1) * std::numbers::pi * x);
}

double series_value(const Eigen::VectorXd& gamma, double x) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < gamma.size(); ++j) sum += gamma[j] * cosine_eval(static_cast<int>(j) + 1, x);
  return sum;
}

Eigen::MatrixXd build_q_hat(const Eigen::VectorXd& w_transformed,
                            const Eigen::VectorXd& x_transformed, int m, int band) {
  if (m < 1 || band < 1) throw ParameterError("series needs m >= 1 and N >= 1");
  if (w_transformed.size() != x_transformed.size())
    throw InputError("transformed W and X have different lengths");
  if (w_transformed.size() == 0) throw InputError("no observations");
  const auto n = static_cast<double>(w_transformed.size());
  Eigen::MatrixXd q = basis_matrix(w_transformed, m).transpose() * basis_matrix(x_transformed, m) / n;
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      if (std::abs(j - k) >= band) q(j, k) = 0.0;
  return q;
}

Eigen::VectorXd build_p_hat(const Eigen::VectorXd& w_transformed, const Eigen::VectorXd& y, int m) {
  if (m < 1) throw ParameterError("series needs m >= 1");
  if (w_transformed.size() != y.size()) throw InputError("transformed W and Y have different lengths");
  if (y.size() == 0) throw InputError("no observations");
  return basis_matrix(w_transformed, m).transpose() * y / static_cast<double>(y.size());
}

int default_series_terms(Eigen::Index n) {
  return std::max(1, static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 1.0 / 6.0))));
}

int default_series_band(Eigen::Index n, int m) {
  const double log_n = std::log(static_cast<double>(n));
  return std::clamp(static_cast<int>(std::ceil(log_n * log_n)), 1, m);
}

SeriesResult series_estimate(const Dataset& data, const SeriesIvConfig& config) {
  if (!(config.a > 0.0) || !std::isfinite(config.a))
    throw ParameterError("ridge parameter a must be positive, got " + std::to_string(config.a));
  if (data.dim_x() != 1 || data.has_z())
    throw InputError("the series estimator handles scalar X and W without z");
  const Eigen::Index n = data.size();
  if (n < 2) throw InputError("estimation needs n >= 2");
  const int m = config.m.value_or(default_series_terms(n));
  const int band = config.band.value_or(default_series_band(n, m));
  if (m < 1 || band < 1) throw ParameterError("series needs m >= 1 and N >= 1");

  Eigen::VectorXd points = config.eval_points;
  if (points.size() == 0) points = default_eval_points().col(0);
  for (Eigen::Index e = 0; e < points.size(); ++e)
    if (!(points[e] >= 0.0 && points[e] <= 1.0))
      throw DomainError("evaluation point " + std::to_string(e + 1) + " lies outside [0, 1]");

  SeriesResult result;
  SeriesFit& fit = result.fit;
  fit.m = m;
  fit.band = band;
  fit.w_transformed = ecdf_transform(data.w().col(0));
  fit.x_transformed = ecdf_transform(data.x().col(0));
  fit.q_hat = build_q_hat(fit.w_transformed, fit.x_transformed, m, band);
  fit.p_hat = build_p_hat(fit.w_transformed, data.y(), m);

  Eigen::MatrixXd system = fit.q_hat * fit.q_hat.transpose();
  system.diagonal().array() += config.a;
  const Eigen::LLT<Eigen::MatrixXd> factor(system);
  if (factor.info() != Eigen::Success) throw NumericalError("series ridge system is not positive definite");
  fit.gamma_hat = factor.solve(fit.q_hat * fit.p_hat);

  Estimate& estimate = result.estimate;
  estimate.points = points;
  estimate.values.resize(points.size());
  for (Eigen::Index e = 0; e < points.size(); ++e)
    estimate.values[e] = series_value(fit.gamma_hat, points[e]);
  estimate.diagnostics.ridge = config.a;
  estimate.diagnostics.ill_determined = m > n;
  return result;
}

}  // namespace npiv
