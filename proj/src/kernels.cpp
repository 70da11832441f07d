#include "npiv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "npiv/errors.hpp"
#include "npiv/quadrature.hpp"

namespace npiv {
namespace {

// Integral of f over [lo, hi] split at 0, where every supported kernel is
// polynomial on each side.
template <typename F>
double piecewise_integral(const QuadratureGrid& unit_rule, double lo, double hi, F&& f) {
  auto piece = [&](double a, double b) {
    if (b <= a) return 0.0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < unit_rule.size(); ++i)
      sum += unit_rule.weights[i] * f(a + (b - a) * unit_rule.nodes[i]);
    return (b - a) * sum;
  };
  if (lo < 0.0 && hi > 0.0) return piece(lo, 0.0) + piece(0.0, hi);
  return piece(lo, hi);
}

const QuadratureGrid& moment_rule() {
  static const QuadratureGrid rule = gauss_legendre(16, 0.0, 1.0);
  return rule;
}

const QuadratureGrid& verification_rule() {
  static const QuadratureGrid rule = gauss_legendre(128, 0.0, 1.0);
  return rule;
}

}  // namespace

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "epanechnikov") return KernelFamily::Epanechnikov;
  if (name == "biweight") return KernelFamily::Biweight;
  if (name == "triweight") return KernelFamily::Triweight;
  if (name == "triangular") return KernelFamily::Triangular;
  throw ParameterError("unknown kernel family '" + std::string(name) + "'");
}

BoundaryPolicy parse_boundary_policy(std::string_view name) {
  if (name == "plain") return BoundaryPolicy::Plain;
  if (name == "matched") return BoundaryPolicy::MomentMatched;
  throw ParameterError("unknown boundary policy '" + std::string(name) +
                       "' (expected plain or matched)");
}

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Epanechnikov: return "epanechnikov";
    case KernelFamily::Biweight: return "biweight";
    case KernelFamily::Triweight: return "triweight";
    case KernelFamily::Triangular: return "triangular";
  }
  return "unknown";
}

std::string_view to_string(BoundaryPolicy policy) {
  return policy == BoundaryPolicy::Plain ? "plain" : "matched";
}

double BaseKernel::eval_unchecked(double u) const {
  if (u < -1.0 || u > 1.0) return 0.0;
  const double s = 1.0 - u * u;
  switch (family_) {
    case KernelFamily::Epanechnikov: return 0.75 * s;
    case KernelFamily::Biweight: return 0.9375 * s * s;
    case KernelFamily::Triweight: return 1.09375 * s * s * s;
    case KernelFamily::Triangular: return 1.0 - std::abs(u);
  }
  return 0.0;
}

double BaseKernel::operator()(double u) const {
  if (!std::isfinite(u)) throw InputError("kernel argument is not finite");
  return eval_unchecked(u);
}

double BaseKernel::truncated_moment(int j, double lo, double hi) const {
  lo = std::max(lo, -1.0);
  hi = std::min(hi, 1.0);
  if (hi <= lo) return 0.0;
  return piecewise_integral(moment_rule(), lo, hi,
                            [&](double u) { return std::pow(u, j) * eval_unchecked(u); });
}

GeneralizedKernel::GeneralizedKernel(BaseKernel base, BoundaryPolicy policy, double bandwidth)
    : base_(base), policy_(policy), bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw ParameterError("bandwidth must be positive, got " + std::to_string(bandwidth));
}

BoundaryCoefficients GeneralizedKernel::coefficients(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("kernel location t must lie in [0, 1]");
  BoundaryCoefficients coef;
  coef.lo = std::max(-1.0, (t - 1.0) / bandwidth_);
  coef.hi = std::min(1.0, t / bandwidth_);
  if (policy_ == BoundaryPolicy::Plain || (coef.lo == -1.0 && coef.hi == 1.0)) return coef;

  const double s0 = base_.truncated_moment(0, coef.lo, coef.hi);
  const double s1 = base_.truncated_moment(1, coef.lo, coef.hi);
  const double s2 = base_.truncated_moment(2, coef.lo, coef.hi);
  const double det = s0 * s2 - s1 * s1;
  coef.c0 = s2 / det;
  coef.c1 = s1 / det;
  coef.interior = false;
  return coef;
}

double GeneralizedKernel::operator()(double u, double t) const {
  if (!std::isfinite(u)) throw InputError("kernel argument is not finite");
  const BoundaryCoefficients coef = coefficients(t);
  if (u > t || u < t - 1.0) return 0.0;
  return eval(u, coef);
}

std::vector<double> GeneralizedKernel::moments(double t, int up_to_j) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("kernel location t must lie in [0, 1]");
  const double lo = std::max(t - 1.0, -bandwidth_);
  const double hi = std::min(t, bandwidth_);
  std::vector<double> out;
  out.reserve(up_to_j + 1);
  for (int j = 0; j <= up_to_j; ++j) {
    const double integral = piecewise_integral(verification_rule(), lo, hi, [&](double u) {
      return std::pow(u, j) * (*this)(u, t);
    });
    out.push_back(integral / std::pow(bandwidth_, j + 1));
  }
  return out;
}

}  // namespace npiv
