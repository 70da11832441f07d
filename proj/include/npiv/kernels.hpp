#pragma once

#include <string_view>
#include <vector>

namespace npiv {

// Symmetric second-order kernels supported on [-1, 1].
enum class KernelFamily { Epanechnikov, Biweight, Triweight, Triangular };

enum class BoundaryPolicy {
  // K_h(u, t) = K(u / h) on the admissible range u in [t - 1, t].
  Plain,
  // Moment-matched multiplier kernel near the edges of [0, 1].
  MomentMatched,
};

KernelFamily parse_kernel_family(std::string_view name);
BoundaryPolicy parse_boundary_policy(std::string_view name);
std::string_view to_string(KernelFamily family);
std::string_view to_string(BoundaryPolicy policy);

class BaseKernel {
 public:
  explicit BaseKernel(KernelFamily family = KernelFamily::Epanechnikov)
      : family_(family) {}

  // K(u); exactly 0 outside [-1, 1]. Throws InputError for non-finite u.
  double operator()(double u) const;

  // Polynomial order r: the first non-vanishing moment beyond j = 0.
  int order() const { return 2; }
  KernelFamily family() const { return family_; }

  // s_j = integral of u^j K(u) over [lo, hi] intersected with [-1, 1].
  // Exact for every supported family (piecewise polynomial integrands).
  double truncated_moment(int j, double lo, double hi) const;

 private:
  double eval_unchecked(double u) const;

  KernelFamily family_;
};

// Boundary multiplier for a fixed location t: K_h(u, t) = (c0 - c1 v) K(v)
// with v = u / h on the admissible range [lo, hi] of v.
struct BoundaryCoefficients {
  double lo = -1.0;
  double hi = 1.0;
  double c0 = 1.0;
  double c1 = 0.0;
  bool interior = true;
};

// The location-dependent kernel K_h(u, t) for t in [0, 1].
//
// Support: K_h(u, t) = 0 whenever u > t or u < t - 1. With the moment-matched
// policy and boundary parameter [lo, hi] = [max(-1, (t-1)/h), min(1, t/h)],
//
//   K_h(u, t) = (s2 - s1 v) K(v) / (s0 s2 - s1^2),   v = u / h,
//
// where s_j are the truncated moments of K over [lo, hi]. This gives
// h^-(j+1) * integral of u^j K_h(u, t) du = 1 (j = 0) and 0 (j = 1) at every t,
// and reduces to K(u / h) exactly when [lo, hi] = [-1, 1].
class GeneralizedKernel {
 public:
  GeneralizedKernel(BaseKernel base, BoundaryPolicy policy, double bandwidth);

  double operator()(double u, double t) const;

  // Evaluate with coefficients precomputed by coefficients(t); skips the
  // domain checks. Used in hot loops over samples at a fixed t.
  double eval(double u, const BoundaryCoefficients& coef) const {
    const double v = u / bandwidth_;
    if (v < coef.lo || v > coef.hi) return 0.0;
    const double k = base_(v);
    return coef.interior ? k : (coef.c0 - coef.c1 * v) * k;
  }

  BoundaryCoefficients coefficients(double t) const;

  // m_j = h^-(j+1) * integral over [t-1, t] of u^j K_h(u, t) du, j = 0..up_to_j,
  // by 128-point Gauss-Legendre on each polynomial piece of the support.
  std::vector<double> moments(double t, int up_to_j) const;

  const BaseKernel& base() const { return base_; }
  BoundaryPolicy policy() const { return policy_; }
  double bandwidth() const { return bandwidth_; }

 private:
  BaseKernel base_;
  BoundaryPolicy policy_;
  double bandwidth_;
};

}  // namespace npiv
