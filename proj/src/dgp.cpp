#include "npiv/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "npiv/errors.hpp"
#include "npiv/rng.hpp"

namespace npiv {

struct Dgp::TableCache {
  std::once_flag once;
  SamplingTable table;
};

namespace {

constexpr double kPi = std::numbers::pi;

double sign(int j) { return j % 2 == 1 ? 1.0 : -1.0; }

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

// Position inside a cumulative table: index k with cdf[k] <= u < cdf[k+1],
// plus the linear fraction within that cell.
struct Draw {
  double value;
  Eigen::Index cell;
};

template <typename Cdf>
Draw invert(const Cdf& cdf, Eigen::Index cells, double u) {
  const double* begin = cdf.data();
  const double* end = begin + cells + 1;
  Eigen::Index k = std::upper_bound(begin, end, u) - begin - 1;
  k = std::clamp<Eigen::Index>(k, 0, cells - 1);
  // Skip empty cells so the result lands where the mass is.
  while (k < cells - 1 && cdf[k + 1] <= cdf[k]) ++k;
  const double width = cdf[k + 1] - cdf[k];
  const double frac = width > 0.0 ? std::clamp((u - cdf[k]) / width, 0.0, 1.0) : 0.5;
  return {(static_cast<double>(k) + frac) / static_cast<double>(cells), k};
}

}  // namespace

Dgp::Dgp(DgpSpec spec) : spec_(spec), cache_(std::make_shared<TableCache>()) {
  if (spec_.j_max < 1) throw ParameterError("series truncation j_max must be at least 1");
  if (!(spec_.sigma_v >= 0.0)) throw ParameterError("noise standard deviation must be >= 0");
  if (spec_.table_size < 2) throw ParameterError("sampling table needs at least 2 cells");
  // Integral of sin(j pi x) over [0,1] is 2 / (j pi) for odd j and 0 for even j.
  double mass = 0.0;
  for (int j = 1; j <= spec_.j_max; j += 2) {
    const double s = 2.0 / (j * kPi);
    mass += s * s / j;
  }
  c_f_ = 1.0 / (2.0 * mass);
}

double Dgp::density(double x, double w) const {
  double sum = 0.0;
  for (int j = 1; j <= spec_.j_max; ++j)
    sum += sign(j) / j * (std::sin(j * kPi * x) * std::sin(j * kPi * w));
  return 2.0 * c_f_ * sum;
}

double Dgp::g_true(double x) const {
  double sum = 0.0;
  for (int j = 1; j <= spec_.j_max; ++j) sum += sign(j) / (static_cast<double>(j) * j) * std::sin(j * kPi * x);
  return std::numbers::sqrt2 * sum;
}

double Dgp::marginal(double x) const {
  double sum = 0.0;
  for (int j = 1; j <= spec_.j_max; j += 2) sum += 2.0 / (j * kPi * j) * std::sin(j * kPi * x);
  return 2.0 * c_f_ * sum;
}

double Dgp::marginal_cdf(double x) const {
  double sum = 0.0;
  for (int j = 1; j <= spec_.j_max; j += 2) {
    const double jp = j * kPi;
    sum += 2.0 / (jp * j) * (1.0 - std::cos(jp * x)) / jp;
  }
  return 2.0 * c_f_ * sum;
}

double Dgp::cond_mean(double w) const {
  check_unit(w, "w");
  const double f_w = marginal(w);
  if (!(f_w >= 1e-12)) throw DomainError("f_W(w) vanishes; conditional mean undefined at the boundary");
  // integral g(x) f(x, w) dx = sqrt(2) C_f sum_j j^-3 sin(j pi w) by sine orthogonality.
  double sum = 0.0;
  for (int j = 1; j <= spec_.j_max; ++j) sum += std::sin(j * kPi * w) / (static_cast<double>(j) * j * j);
  return std::numbers::sqrt2 * c_f_ * sum / f_w;
}

double Dgp::t_true(double x, double z) const {
  double sum = 0.0;
  for (int j = 1; j <= spec_.j_max; ++j)
    sum += 2.0 * std::sin(j * kPi * x) * std::sin(j * kPi * z) / (static_cast<double>(j) * j);
  return c_f_ * c_f_ * sum;
}

double Dgp::eigenvalue(int j) const {
  if (j < 1) throw ParameterError("eigenvalue index starts at 1");
  if (j > spec_.j_max) return 0.0;
  return c_f_ * c_f_ / (static_cast<double>(j) * j);
}

const SamplingTable& Dgp::table() const {
  std::call_once(cache_->once, [this] {
    const int size = spec_.table_size;
    Eigen::MatrixXd sines(size, spec_.j_max);
    for (int k = 0; k < size; ++k) {
      const double center = (k + 0.5) / size;
      for (int j = 1; j <= spec_.j_max; ++j) sines(k, j - 1) = std::sin(j * kPi * center);
    }
    Eigen::VectorXd coef(spec_.j_max);
    for (int j = 1; j <= spec_.j_max; ++j) coef[j - 1] = 2.0 * c_f_ * sign(j) / j;
    // values(l, k) = f(w_l, x_k); symmetric, column k is the x-cell.
    Eigen::MatrixXd values = sines * coef.asDiagonal() * sines.transpose();

    SamplingTable& table = cache_->table;
    table.size = size;
    double negative = 0.0;
    double positive = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      double& v = values.data()[i];
      if (v < 0.0) {
        negative -= v;
        v = 0.0;
      } else {
        positive += v;
      }
    }
    table.clamped_mass = negative / positive;

    table.w_cdf.resize(size + 1, size);
    Eigen::VectorXd column_mass(size);
    for (int k = 0; k < size; ++k) {
      double run = 0.0;
      table.w_cdf(0, k) = 0.0;
      for (int l = 0; l < size; ++l) {
        run += values(l, k);
        table.w_cdf(l + 1, k) = run;
      }
      column_mass[k] = run;
      if (run > 0.0) {
        table.w_cdf.col(k) /= run;
      } else {
        for (int l = 0; l <= size; ++l) table.w_cdf(l, k) = static_cast<double>(l) / size;
      }
      table.w_cdf(size, k) = 1.0;
    }
    table.x_cdf.resize(size + 1);
    table.x_cdf[0] = 0.0;
    for (int k = 0; k < size; ++k) table.x_cdf[k + 1] = table.x_cdf[k] + column_mass[k];
    table.x_cdf /= table.x_cdf[size];
    table.x_cdf[size] = 1.0;
  });
  return cache_->table;
}

Dataset Dgp::sample(Eigen::Index n, std::uint64_t seed) const {
  if (n < 1) throw ParameterError("sample size must be at least 1");
  const SamplingTable& tab = table();
  Rng rng(seed);
  Eigen::VectorXd x(n), w(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Draw xi = invert(tab.x_cdf, tab.size, rng.uniform());
    const Draw wi = invert(tab.w_cdf.col(xi.cell), tab.size, rng.uniform());
    x[i] = xi.value;
    w[i] = wi.value;
    y[i] = cond_mean(wi.value) + spec_.sigma_v * rng.normal();
  }
  return Dataset::scalar(x, w, y);
}

}  // namespace npiv
