#pragma once

#include <Eigen/Dense>
#include <optional>

#include "npiv/dataset.hpp"
#include "npiv/kernel_iv.hpp"

namespace npiv {

struct SeriesIvConfig {
  // Unset: m = ceil(n^(1/6)) and N = min(m, ceil(log(n)^2)).
  std::optional<int> m;
  std::optional<int> band;
  double a = 0.1;
  Eigen::VectorXd eval_points;
};

struct SeriesFit {
  Eigen::VectorXd gamma_hat;
  Eigen::MatrixXd q_hat;
  Eigen::VectorXd p_hat;
  Eigen::VectorXd w_transformed;
  Eigen::VectorXd x_transformed;
  int m = 0;
  int band = 0;
};

struct SeriesResult {
  SeriesFit fit;
  Estimate estimate;
};

// rank_i / n with rank_i = #{j : s_j <= s_i}. Throws InputError on
// non-finite input or an empty sample.
Eigen::VectorXd ecdf_transform(const Eigen::VectorXd& samples);

// Orthonormal cosine basis on [0,1]: chi_1 = 1, chi_{j+1}(x) = sqrt(2) cos(j pi x).
double cosine_eval(int j, double x);

// Entry (j, k) = n^-1 sum_i chi_j(W_i) chi_k(X_i) when |j - k| < band, else 0.
Eigen::MatrixXd build_q_hat(const Eigen::VectorXd& w_transformed,
                            const Eigen::VectorXd& x_transformed, int m, int band);

// p_j = n^-1 sum_i chi_j(W_i) Y_i.
Eigen::VectorXd build_p_hat(const Eigen::VectorXd& w_transformed, const Eigen::VectorXd& y,
                            int m);

// gamma_hat = (Q Q' + a I)^-1 Q p, g_bar(x) = sum_j gamma_hat_j chi_j(x).
SeriesResult series_estimate(const Dataset& data, const SeriesIvConfig& config);

// Evaluate sum_j gamma_j chi_j(x).
double series_value(const Eigen::VectorXd& gamma, double x);

int default_series_terms(Eigen::Index n);
int default_series_band(Eigen::Index n, int m);

}  // namespace npiv
