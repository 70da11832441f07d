#include <doctest.h>

#include <cmath>
#include <limits>

#include "npiv/errors.hpp"
#include "npiv/kernels.hpp"

using namespace npiv;

namespace {

// Composite Simpson rule, independent of the library's Gauss-Legendre code.
template <typename F>
double simpson(F f, double lo, double hi, int panels = 20000) {
  const double step = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int k = 1; k < panels; ++k) sum += f(lo + k * step) * (k % 2 ? 4.0 : 2.0);
  return sum * step / 3.0;
}

const KernelFamily kFamilies[] = {KernelFamily::Epanechnikov, KernelFamily::Biweight,
                                  KernelFamily::Triweight, KernelFamily::Triangular};

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("Epanechnikov values and support") {
    const BaseKernel k;
    CHECK(k(0.0) == 0.75);
    CHECK(k(1.0) == 0.0);
    CHECK(k(-1.0) == 0.0);
    CHECK(k(1.5) == 0.0);
    CHECK(k(0.3) == k(-0.3));
    CHECK(simpson([&](double u) { return u * u * k(u); }, -1.0, 1.0) ==
          doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("every family integrates to one with zero first moment") {
    for (KernelFamily family : kFamilies) {
      const BaseKernel k(family);
      CAPTURE(to_string(family));
      CHECK(std::abs(simpson([&](double u) { return k(u); }, -1.0, 1.0) - 1.0) < 1e-8);
      CHECK(std::abs(simpson([&](double u) { return u * k(u); }, -1.0, 1.0)) < 1e-8);
      CHECK(std::abs(k.truncated_moment(0, -1.0, 1.0) - 1.0) < 1e-12);
      CHECK(std::abs(k.truncated_moment(2, -0.4, 0.7) -
                     simpson([&](double u) { return u * u * k(u); }, -0.4, 0.7)) < 1e-10);
    }
  }

  TEST_CASE("non-finite argument is an input error") {
    const BaseKernel k;
    CHECK_THROWS_AS(k(std::numeric_limits<double>::quiet_NaN()), InputError);
    CHECK_THROWS_AS(k(std::numeric_limits<double>::infinity()), InputError);
  }

  TEST_CASE("generalized kernel preconditions") {
    CHECK_THROWS_AS(GeneralizedKernel(BaseKernel(), BoundaryPolicy::Plain, 0.0), ParameterError);
    CHECK_THROWS_AS(GeneralizedKernel(BaseKernel(), BoundaryPolicy::Plain, -0.1), ParameterError);
    const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::MomentMatched, 0.2);
    CHECK_THROWS_AS(gk(0.0, -0.01), DomainError);
    CHECK_THROWS_AS(gk(0.0, 1.01), DomainError);
  }

  TEST_CASE("support condition holds for both policies") {
    for (BoundaryPolicy policy : {BoundaryPolicy::Plain, BoundaryPolicy::MomentMatched}) {
      const GeneralizedKernel gk(BaseKernel(), policy, 0.2);
      for (double t = 0.0; t <= 1.0; t += 0.05) {
        CHECK(gk(t + 0.01, t) == 0.0);
        CHECK(gk(t - 1.0 - 1e-9, t) == 0.0);
      }
    }
  }

  TEST_CASE("interior reduction is exact") {
    const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::MomentMatched, 0.1);
    CHECK(gk(0.0, 0.5) == 0.75);
    const BaseKernel k;
    for (double t = 0.1; t <= 0.9; t += 0.05)
      for (double u = -0.1; u <= 0.1; u += 0.01) CHECK(gk(u, t) == k(u / 0.1));
    const GeneralizedKernel plain(BaseKernel(), BoundaryPolicy::Plain, 0.2);
    CHECK(plain(-0.1, 0.0) == k(-0.5));
  }

  TEST_CASE("boundary value at t = 0 matches an independent 2x2 moment solve") {
    const BaseKernel k;
    // Truncated moments over [-1, 0] by Simpson, then K_c(v) = (s2 - s1 v) K(v) / det.
    const double s0 = simpson([&](double v) { return k(v); }, -1.0, 0.0);
    const double s1 = simpson([&](double v) { return v * k(v); }, -1.0, 0.0);
    const double s2 = simpson([&](double v) { return v * v * k(v); }, -1.0, 0.0);
    const double v = -0.5;
    const double expected = (s2 - s1 * v) * k(v) / (s0 * s2 - s1 * s1);
    const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::MomentMatched, 0.2);
    CHECK(gk(-0.1, 0.0) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(gk(-0.1, 0.0) == doctest::Approx(0.2368421052631579).epsilon(1e-12));
  }

  TEST_CASE("moment conditions under matching on a t grid") {
    for (KernelFamily family : kFamilies)
      for (double h : {0.1, 0.2, 0.4}) {
        const GeneralizedKernel gk(BaseKernel(family), BoundaryPolicy::MomentMatched, h);
        for (int i = 0; i <= 20; ++i) {
          const double t = i / 20.0;
          const std::vector<double> m = gk.moments(t, 1);
          CAPTURE(t);
          CHECK(std::abs(m[0] - 1.0) < 1e-6);
          CHECK(std::abs(m[1]) < 1e-6);
        }
      }
  }

  TEST_CASE("plain policy loses mass at the boundary") {
    const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::Plain, 0.2);
    const double m0 = gk.moments(0.05, 0)[0];
    CHECK(m0 < 1.0);
    const BaseKernel k;
    CHECK(m0 == doctest::Approx(simpson([&](double v) { return k(v); }, -1.0, 0.25)).epsilon(1e-10));
  }

  TEST_CASE("boundary kernels are bounded") {
    for (double h : {0.05, 0.2, 0.5}) {
      const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::MomentMatched, h);
      double sup = 0.0;
      for (int i = 0; i <= 200; ++i) {
        const double t = i / 200.0;
        for (int j = -100; j <= 100; ++j) {
          const double u = h * j / 100.0;
          sup = std::max(sup, std::abs(gk(u, t)));
        }
      }
      CHECK(sup < 10.0);
    }
  }

  TEST_CASE("name parsing round-trips") {
    for (KernelFamily family : kFamilies) CHECK(parse_kernel_family(to_string(family)) == family);
    CHECK(parse_boundary_policy("plain") == BoundaryPolicy::Plain);
    CHECK(parse_boundary_policy("matched") == BoundaryPolicy::MomentMatched);
    CHECK_THROWS_AS(parse_boundary_policy("reflect"), ParameterError);
  }
}
