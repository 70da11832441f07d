#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "npiv/density.hpp"
#include "npiv/errors.hpp"
#include "npiv/quadrature.hpp"

using namespace npiv;

namespace {

Eigen::VectorXd point(double v) { return Eigen::VectorXd::Constant(1, v); }

double epanechnikov(double v) { return std::abs(v) <= 1.0 ? 0.75 * (1.0 - v * v) : 0.0; }

}  // namespace

TEST_SUITE("density") {
  TEST_CASE("single observation hand value") {
    const Dataset d = Dataset::scalar(point(0.5), point(0.5), point(1.0));
    const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::Plain, 0.25);
    CHECK(kde_joint(d, gk, point(0.5), point(0.5)) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(kde_joint(d, gk, point(0.1), point(0.5)) == 0.0);
  }

  TEST_CASE("leave-one-out on two observations equals the singleton estimate") {
    Eigen::VectorXd x(2), w(2), y(2);
    x << 0.4, 0.55;
    w << 0.45, 0.6;
    y << 1.0, 2.0;
    const Dataset d = Dataset::scalar(x, w, y);
    const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::Plain, 0.3);
    const Dataset second = Dataset::scalar(point(0.55), point(0.6), point(2.0));
    CHECK(kde_loo(d, gk, point(0.5), point(0.5), 0) == kde_joint(second, gk, point(0.5), point(0.5)));
    const Dataset single = Dataset::scalar(point(0.5), point(0.5), point(1.0));
    CHECK_THROWS_AS(kde_loo(single, gk, point(0.5), point(0.5), 0), InputError);
    CHECK_THROWS_AS(kde_loo(d, gk, point(0.5), point(0.5), 2), InputError);
  }

  TEST_CASE("linear-combination identity for every observation") {
    const Dataset d = fixtures::design_sample(20, 11);
    for (BoundaryPolicy policy : {BoundaryPolicy::Plain, BoundaryPolicy::MomentMatched}) {
      const GeneralizedKernel gk(BaseKernel(), policy, 0.2);
      const double h2 = 0.04;
      for (double xq : {0.0, 0.1, 0.37, 0.5, 0.93})
        for (double wq : {0.05, 0.5, 1.0}) {
          const double joint = kde_joint(d, gk, point(xq), point(wq));
          for (Eigen::Index i = 0; i < d.size(); ++i) {
            const double own = gk(xq - d.x()(i, 0), xq) * gk(wq - d.w()(i, 0), wq) / h2;
            const double rebuilt = (19.0 * kde_loo(d, gk, point(xq), point(wq), i) + own) / 20.0;
            CHECK(std::abs(joint - rebuilt) < 1e-12);
          }
        }
    }
  }

  TEST_CASE("leave-one-out matches brute-force summation") {
    const Dataset d = fixtures::design_sample(20, 5);
    const double h = 0.2;
    const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::Plain, h);
    for (double xq : {0.1, 0.5, 0.8})
      for (double wq : {0.2, 0.6})
        for (Eigen::Index omit = 0; omit < d.size(); ++omit) {
          double sum = 0.0;
          for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (i == omit) continue;
            const double u = xq - d.x()(i, 0);
            const double v = wq - d.w()(i, 0);
            const bool inside_x = u <= xq && u >= xq - 1.0;
            const bool inside_w = v <= wq && v >= wq - 1.0;
            if (inside_x && inside_w) sum += epanechnikov(u / h) * epanechnikov(v / h);
          }
          const double expected = sum / (19.0 * h * h);
          CHECK(std::abs(kde_loo(d, gk, point(xq), point(wq), omit) - expected) < 1e-12);
        }
  }

  TEST_CASE("boundary-matched estimate keeps unit mass") {
    // Smooth (uniform) data: the per-point j = 0 moment condition carries over
    // to the integral, while the plain kernel loses mass near the edges.
    std::mt19937_64 engine(3);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Eigen::VectorXd x(20000), w(20000);
    for (Eigen::Index i = 0; i < 20000; ++i) {
      x[i] = uniform(engine);
      w[i] = uniform(engine);
    }
    const Dataset d = Dataset::scalar(x, w, Eigen::VectorXd::Zero(20000));
    const QuadratureGrid g = build_grid(160);
    auto mass = [&](BoundaryPolicy policy) {
      const GeneralizedKernel gk(BaseKernel(), policy, 0.2);
      const Eigen::MatrixXd kx = kernel_matrix(gk, g.nodes, d.x());
      const Eigen::MatrixXd kw = kernel_matrix(gk, g.nodes, d.w());
      return g.weights.dot(kx * kw.transpose() * g.weights) / (20000 * 0.04);
    };
    CHECK(std::abs(mass(BoundaryPolicy::MomentMatched) - 1.0) < 2e-3);
    CHECK(mass(BoundaryPolicy::Plain) < 0.9);
  }

  TEST_CASE("kernel matrix agrees with pointwise evaluation") {
    const Dataset d = fixtures::design_sample(15, 2);
    const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::MomentMatched, 0.25);
    Eigen::MatrixXd queries(4, 1);
    queries << 0.0, 0.1, 0.5, 1.0;
    const Eigen::MatrixXd k = kernel_matrix(gk, queries, d.x());
    for (Eigen::Index r = 0; r < queries.rows(); ++r)
      for (Eigen::Index i = 0; i < d.size(); ++i)
        CHECK(k(r, i) == gk(queries(r, 0) - d.x()(i, 0), queries(r, 0)));
    Eigen::MatrixXd outside(1, 1);
    outside << 1.5;
    CHECK_THROWS_AS(kernel_matrix(gk, outside, d.x()), DomainError);
  }

  TEST_CASE("trivariate density reduces to the bivariate one when Z is constant") {
    const Dataset base = fixtures::design_sample(25, 9);
    const Dataset d(base.x(), base.w(), base.y(), Eigen::MatrixXd::Constant(25, 1, 0.5));
    const GeneralizedKernel gk(BaseKernel(), BoundaryPolicy::Plain, 0.2);
    const GeneralizedKernel gz(BaseKernel(), BoundaryPolicy::Plain, 0.3);
    const double kz = gz(0.0, 0.5) / 0.3;
    const double joint = kde_joint_xzw(d, gk, gz, point(0.4), point(0.5), point(0.6));
    CHECK(joint == doctest::Approx(kz * kde_joint(base, gk, point(0.4), point(0.6))).epsilon(1e-13));
    const double loo = kde_loo_xzw(d, gk, gz, point(0.4), point(0.5), point(0.6), 3);
    CHECK(loo == doctest::Approx(kz * kde_loo(base, gk, point(0.4), point(0.6), 3)).epsilon(1e-13));
  }
}
