#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fixtures.hpp"
#include "npiv/density.hpp"
#include "npiv/errors.hpp"
#include "npiv/kernel_iv.hpp"
#include "oracle.hpp"

using namespace npiv;

namespace {

oracle::Sample to_sample(const Dataset& d) {
  oracle::Sample s;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    s.x.push_back(d.x()(i, 0));
    s.w.push_back(d.w()(i, 0));
    s.y.push_back(d.y()[i]);
    if (d.has_z()) s.z.push_back(d.z()(i, 0));
  }
  return s;
}

std::vector<double> eval_list() {
  std::vector<double> out;
  for (int j = 0; j <= 10; ++j) out.push_back(j / 10.0);
  out.push_back(0.37);
  return out;
}

KernelIvConfig trapezoid_config(int m, BoundaryPolicy policy) {
  KernelIvConfig cfg;
  cfg.grid = {m, 0, GridScheme::Trapezoid};
  cfg.boundary = policy;
  const std::vector<double> pts = eval_list();
  cfg.eval_points.resize(static_cast<Eigen::Index>(pts.size()), 1);
  for (std::size_t e = 0; e < pts.size(); ++e) cfg.eval_points(static_cast<Eigen::Index>(e), 0) = pts[e];
  return cfg;
}

double max_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("kernel_iv") {
  TEST_CASE("bivariate estimate matches the direct-assembly oracle") {
    for (BoundaryPolicy policy : {BoundaryPolicy::Plain, BoundaryPolicy::MomentMatched})
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Dataset d = fixtures::design_sample(20, seed);
        const KernelIvConfig cfg = trapezoid_config(33, policy);
        const Estimate est = estimate_bivariate(d, cfg);
        oracle::Settings settings;
        settings.grid_size = 33;
        settings.matched = policy == BoundaryPolicy::MomentMatched;
        const std::vector<double> expected = oracle::estimate(to_sample(d), settings, eval_list());
        for (std::size_t e = 0; e < expected.size(); ++e)
          CHECK(std::abs(est.values[static_cast<Eigen::Index>(e)] - expected[e]) < 1e-8);
      }
  }

  TEST_CASE("multivariate estimate matches the direct-assembly oracle") {
    for (std::uint64_t seed : {4u, 5u})
      for (double z0 : {0.0, 0.35, 0.8}) {
        const Dataset d = fixtures::design_sample_with_z(30, seed);
        KernelIvConfig cfg = trapezoid_config(33, BoundaryPolicy::Plain);
        cfg.h_z = 0.3;
        const Estimate est = estimate_multivariate(d, cfg, Eigen::VectorXd::Constant(1, z0));
        oracle::Settings settings;
        settings.grid_size = 33;
        settings.h_z = 0.3;
        const std::vector<double> expected = oracle::estimate(to_sample(d), settings, eval_list(), z0);
        for (std::size_t e = 0; e < expected.size(); ++e)
          CHECK(std::abs(est.values[static_cast<Eigen::Index>(e)] - expected[e]) < 1e-8);
      }
  }

  TEST_CASE("zero response gives a zero estimate") {
    const Dataset d = fixtures::design_sample(50, 6).with_y(Eigen::VectorXd::Zero(50));
    CHECK(estimate_bivariate(d, KernelIvConfig{}).values.isZero(0.0));
    const Dataset dz = fixtures::design_sample_with_z(50, 6).with_y(Eigen::VectorXd::Zero(50));
    CHECK(estimate_multivariate(dz, KernelIvConfig{}, Eigen::VectorXd::Constant(1, 0.5)).values.isZero(0.0));
  }

  TEST_CASE("estimate is linear in the response") {
    const Dataset d = fixtures::design_sample(80, 7);
    Eigen::VectorXd y2(80);
    for (Eigen::Index i = 0; i < 80; ++i) y2[i] = std::sin(7.0 * static_cast<double>(i));
    const KernelIvConfig cfg;
    const Eigen::VectorXd g1 = estimate_bivariate(d, cfg).values;
    const Eigen::VectorXd g2 = estimate_bivariate(d.with_y(y2), cfg).values;
    const Eigen::VectorXd combo = estimate_bivariate(d.with_y(2.5 * d.y() - 0.75 * y2), cfg).values;
    CHECK(max_diff(combo, 2.5 * g1 - 0.75 * g2) < 1e-10);
    const Eigen::VectorXd scaled = estimate_bivariate(d.with_y(3.0 * d.y()), cfg).values;
    CHECK(max_diff(scaled, 3.0 * g1) < 1e-10);
  }

  TEST_CASE("ridge bound on the estimate") {
    const Dataset d = fixtures::design_sample(60, 8);
    KernelIvConfig cfg;
    cfg.spectrum_diagnostics = false;
    const QuadratureGrid grid = build_grid(cfg.grid.grid_size);
    // On the grid nodes the extension reproduces the grid solution, so the
    // spectral bound ||psi_i|| <= ||f^(-i)(., W_i)|| / a applies directly.
    cfg.eval_points = grid.nodes;
    const GeneralizedKernel gk(BaseKernel(), cfg.boundary, cfg.h);
    auto grid_norm = [&](const Eigen::VectorXd& v) { return std::sqrt(grid.weights.dot(v.cwiseAbs2())); };
    double bound = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      Eigen::VectorXd rhs(grid.size());
      for (Eigen::Index e = 0; e < grid.size(); ++e)
        rhs[e] = kde_loo(d, gk, Eigen::VectorXd::Constant(1, grid.nodes[e]), d.w().row(i).transpose(), i);
      bound += std::abs(d.y()[i]) * grid_norm(rhs);
    }
    bound /= static_cast<double>(d.size());
    double previous = std::numeric_limits<double>::infinity();
    for (double a : {0.05, 1.0, 100.0, 1e4, 1e6}) {
      cfg.a = a;
      const double norm = grid_norm(estimate_bivariate(d, cfg).values);
      CHECK(norm <= bound / a + 1e-10);
      CHECK(norm < previous);
      previous = norm;
    }
  }

  TEST_CASE("row order does not matter") {
    const Dataset d = fixtures::design_sample(60, 9);
    const KernelIvConfig cfg;
    const Dataset shuffled = d.permuted(fixtures::shuffled_order(60, 3));
    CHECK((estimate_bivariate(d, cfg).values.array() == estimate_bivariate(shuffled, cfg).values.array()).all());
    const Dataset dz = fixtures::design_sample_with_z(60, 9);
    const Eigen::VectorXd z0 = Eigen::VectorXd::Constant(1, 0.4);
    CHECK((estimate_multivariate(dz, cfg, z0).values.array() ==
           estimate_multivariate(dz.permuted(fixtures::shuffled_order(60, 4)), cfg, z0).values.array())
              .all());
  }

  TEST_CASE("preconditions") {
    const Dataset d = fixtures::design_sample(20, 10);
    KernelIvConfig cfg;
    cfg.h = 0.0;
    CHECK_THROWS_AS(estimate_bivariate(d, cfg), ParameterError);
    cfg = {};
    cfg.a = 0.0;
    CHECK_THROWS_AS(estimate_bivariate(d, cfg), ParameterError);
    cfg = {};
    cfg.eval_points = Eigen::MatrixXd::Constant(1, 1, 1.2);
    CHECK_THROWS_AS(estimate_bivariate(d, cfg), DomainError);
    CHECK_THROWS_AS(estimate_multivariate(d, KernelIvConfig{}, Eigen::VectorXd::Constant(1, 0.5)), InputError);
    const Dataset dz = fixtures::design_sample_with_z(20, 10);
    CHECK_THROWS_AS(estimate_bivariate(dz, KernelIvConfig{}), InputError);
    CHECK_THROWS_AS(estimate_multivariate(dz, KernelIvConfig{}, Eigen::VectorXd::Constant(2, 0.5)),
                    ParameterError);
  }

  TEST_CASE("diagnostics") {
    const Dataset d = fixtures::design_sample(100, 11);
    const Estimate est = estimate_bivariate(d, KernelIvConfig{});
    CHECK(est.values.size() == 19);
    CHECK(est.diagnostics.leading_eigenvalues.size() == 10);
    CHECK(est.diagnostics.effective_dof > 0.0);
    CHECK(est.diagnostics.ridge == 0.1);
    // Every Z far from z0: the localization weights vanish.
    const Dataset base = fixtures::design_sample(30, 12);
    const Dataset far(base.x(), base.w(), base.y(), Eigen::MatrixXd::Constant(30, 1, 0.0));
    const Estimate sparse = estimate_multivariate(far, KernelIvConfig{}, Eigen::VectorXd::Constant(1, 0.9));
    CHECK(sparse.diagnostics.sparse_locality);
    CHECK(sparse.values.isZero(0.0));
  }

  TEST_CASE("an irrelevant covariate leaves the estimate within sampling noise") {
    const Dataset d = fixtures::design_sample_with_z(400, 13);
    const Dataset bivariate(d.x(), d.w(), d.y());
    KernelIvConfig cfg;
    cfg.h_z = 0.3;
    const Eigen::VectorXd g = estimate_bivariate(bivariate, cfg).values;
    const Eigen::VectorXd g1 = estimate_multivariate(d, cfg, Eigen::VectorXd::Constant(1, 0.3)).values;
    const Eigen::VectorXd g2 = estimate_multivariate(d, cfg, Eigen::VectorXd::Constant(1, 0.7)).values;
    // Interior points only; the local samples are a fraction of n.
    for (Eigen::Index e = 3; e < 16; ++e) {
      CHECK(std::abs(g1[e] - g[e]) < 0.5);
      CHECK(std::abs(g2[e] - g[e]) < 0.5);
    }
  }

  TEST_CASE("estimation band") {
    Eigen::MatrixXd reps(4, 2);
    reps << 1.0, 0.0, 1.5, 0.1, 0.2, -0.3, 1.1, 0.0;
    const Eigen::VectorXd truth = Eigen::Vector2d(1.0, 0.0);
    const Eigen::VectorXd full = estimation_band(reps, truth, 1.0);
    CHECK(full[0] == doctest::Approx(0.8));
    CHECK(full[1] == doctest::Approx(0.3));
    const Eigen::VectorXd half = estimation_band(reps, truth, 0.5);
    CHECK(half[0] == doctest::Approx(0.1));
    CHECK(half[1] == doctest::Approx(0.0));
    const Eigen::MatrixXd exact = truth.transpose().replicate(5, 1);
    CHECK(estimation_band(exact, truth, 0.95).isZero(0.0));
    CHECK_THROWS_AS(estimation_band(reps, truth, 0.0), ParameterError);
    CHECK_THROWS_AS(estimation_band(reps, truth, 1.5), ParameterError);
    CHECK_THROWS_AS(estimation_band(reps.topRows(1), truth, 0.9), ParameterError);
  }
}
