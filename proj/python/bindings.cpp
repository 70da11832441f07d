#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "npiv/dgp.hpp"
#include "npiv/errors.hpp"
#include "npiv/kernel_iv.hpp"
#include "npiv/monte_carlo.hpp"
#include "npiv/operator.hpp"
#include "npiv/series_iv.hpp"

namespace py = pybind11;
using namespace npiv;

namespace {

// 1-D arrays become a single column; 2-D arrays keep their shape.
Eigen::MatrixXd as_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() == 1) {
    Eigen::MatrixXd out(a.shape(0), 1);
    for (py::ssize_t i = 0; i < a.shape(0); ++i) out(i, 0) = a.at(i);
    return out;
  }
  if (a.ndim() != 2) throw InputError("expected a 1-D or 2-D array");
  Eigen::MatrixXd out(a.shape(0), a.shape(1));
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j) out(i, j) = a.at(i, j);
  return out;
}

Eigen::VectorXd as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  const Eigen::MatrixXd m = as_matrix(a);
  if (m.cols() != 1) throw InputError("expected a 1-D array");
  return m.col(0);
}

OperatorOptions grid_options(int grid_size, int w_grid_size, const std::string& scheme) {
  return {grid_size, w_grid_size, parse_grid_scheme(scheme)};
}

py::dict diagnostics_dict(const EstimateDiagnostics& d) {
  py::dict out;
  out["ridge"] = d.ridge;
  out["bandwidth"] = d.bandwidth;
  out["bandwidth_z"] = d.bandwidth_z;
  out["leading_eigenvalues"] = d.leading_eigenvalues;
  out["effective_dof"] = d.effective_dof;
  out["sparse_locality"] = d.sparse_locality;
  out["ill_determined"] = d.ill_determined;
  return out;
}

py::dict estimate_dict(const Estimate& e) {
  py::dict out;
  out["points"] = e.points;
  out["values"] = e.values;
  out["diagnostics"] = diagnostics_dict(e.diagnostics);
  return out;
}

py::dict estimate_kernel(const py::array_t<double>& x, const py::array_t<double>& w,
                         const py::array_t<double>& y, std::optional<py::array_t<double>> z,
                         std::optional<py::array_t<double>> z0, double h, double h_z, double a,
                         int grid_size, int w_grid_size, const std::string& scheme,
                         const std::string& boundary, const std::string& kernel,
                         std::optional<py::array_t<double>> eval_points) {
  std::optional<Eigen::MatrixXd> zm;
  if (z) zm = as_matrix(*z);
  const Dataset data(as_matrix(x), as_matrix(w), as_vector(y), zm);
  KernelIvConfig cfg;
  cfg.h = h;
  cfg.h_z = h_z;
  cfg.a = a;
  cfg.grid = grid_options(grid_size, w_grid_size, scheme);
  cfg.boundary = parse_boundary_policy(boundary);
  cfg.kernel = parse_kernel_family(kernel);
  if (eval_points) cfg.eval_points = as_matrix(*eval_points);
  if (data.has_z()) {
    if (!z0) throw ParameterError("z0 is required when z is given");
    return estimate_dict(estimate_multivariate(data, cfg, as_vector(*z0)));
  }
  return estimate_dict(estimate_bivariate(data, cfg));
}

py::dict estimate_series(const py::array_t<double>& x, const py::array_t<double>& w,
                         const py::array_t<double>& y, std::optional<int> m, std::optional<int> band,
                         double a, std::optional<py::array_t<double>> eval_points) {
  const Dataset data = Dataset::scalar(as_vector(x), as_vector(w), as_vector(y));
  SeriesIvConfig cfg;
  cfg.m = m;
  cfg.band = band;
  cfg.a = a;
  if (eval_points) cfg.eval_points = as_vector(*eval_points);
  const SeriesResult r = series_estimate(data, cfg);
  py::dict out = estimate_dict(r.estimate);
  out["gamma_hat"] = r.fit.gamma_hat;
  out["q_hat"] = r.fit.q_hat;
  out["p_hat"] = r.fit.p_hat;
  out["m"] = r.fit.m;
  out["band"] = r.fit.band;
  return out;
}

py::dict simulate(long n, int reps, std::optional<std::vector<std::pair<double, double>>> cells,
                  std::uint64_t seed, const std::string& estimator, const std::string& boundary,
                  int grid_size, int series_m, int series_band, double level, int threads) {
  McConfig cfg;
  cfg.n = n;
  cfg.reps = reps;
  if (cells)
    for (const auto& [a, h] : *cells) cfg.cells.push_back({a, h});
  cfg.base_seed = seed;
  cfg.estimator = parse_estimator(estimator);
  cfg.boundary = parse_boundary_policy(boundary);
  cfg.grid.grid_size = grid_size;
  cfg.series_m = series_m;
  cfg.series_band = series_band;
  cfg.band_level = level;
  cfg.threads = threads;
  McReport report;
  {
    py::gil_scoped_release release;
    report = run_monte_carlo(cfg, Dgp());
  }
  py::list out_cells;
  for (const McCellReport& c : report.cells) {
    py::dict d;
    d["a"] = c.cell.a;
    d["h"] = c.cell.h;
    d["bias2"] = c.bias2;
    d["var"] = c.var;
    d["mse"] = c.mse;
    d["mean"] = c.mean;
    d["point_bias2"] = c.point_bias2;
    d["point_var"] = c.point_var;
    d["point_mse"] = c.point_mse;
    d["band"] = c.band;
    d["failures"] = c.failures;
    out_cells.append(d);
  }
  py::dict out;
  out["eval_points"] = report.eval_points;
  out["truth"] = report.truth;
  out["cells"] = out_cells;
  out["config_hash"] = report.config_hash;
  return out;
}

py::dict rate_study_py(std::vector<Eigen::Index> sizes, int reps, std::uint64_t seed, double gamma,
                       double a_ref, double h_ref, const std::string& boundary, int grid_size,
                       int threads) {
  RateStudyConfig cfg;
  cfg.sizes = std::move(sizes);
  cfg.reps = reps;
  cfg.base_seed = seed;
  cfg.gamma = gamma;
  cfg.a_ref = a_ref;
  cfg.h_ref = h_ref;
  cfg.boundary = parse_boundary_policy(boundary);
  cfg.grid.grid_size = grid_size;
  cfg.threads = threads;
  RateStudyReport r;
  {
    py::gil_scoped_release release;
    r = rate_study(cfg, Dgp());
  }
  py::list points;
  for (const RatePoint& p : r.points) {
    py::dict d;
    d["n"] = p.n;
    d["a"] = p.a;
    d["h"] = p.h;
    d["mise"] = p.mise;
    d["failures"] = p.failures;
    points.append(d);
  }
  py::dict out;
  out["points"] = points;
  out["slope"] = r.slope;
  out["slope_stderr"] = r.slope_stderr;
  out["target"] = r.target;
  return out;
}

Eigen::VectorXd spectrum_of_data(const py::array_t<double>& x, const py::array_t<double>& w, double h,
                                 double a, int grid_size, int w_grid_size, const std::string& boundary) {
  const Eigen::MatrixXd xm = as_matrix(x);
  const Dataset data(xm, as_matrix(w), Eigen::VectorXd::Zero(xm.rows()));
  const GeneralizedKernel kernel(BaseKernel(), parse_boundary_policy(boundary), h);
  return discretize_operator(data, kernel, grid_options(grid_size, w_grid_size, "gauss"), a).spectrum().values;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonparametric instrumental-variables regression";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<Dgp>(m, "Design", "The built-in simulation design with known g.")
      .def(py::init([](int j_max, double sigma_v) { return Dgp(DgpSpec{j_max, sigma_v, 1024}); }),
           py::arg("j_max") = 100, py::arg("sigma_v") = 0.1)
      .def_property_readonly("c_f", &Dgp::c_f)
      .def("density", py::vectorize(&Dgp::density), py::arg("x"), py::arg("w"))
      .def("g_true", py::vectorize(&Dgp::g_true), py::arg("x"))
      .def("marginal", py::vectorize(&Dgp::marginal), py::arg("x"))
      .def("cond_mean", py::vectorize(&Dgp::cond_mean), py::arg("w"))
      .def("eigenvalue", &Dgp::eigenvalue, py::arg("j"))
      .def(
          "sample",
          [](const Dgp& dgp, Eigen::Index n, std::uint64_t seed) {
            const Dataset d = dgp.sample(n, seed);
            return py::make_tuple(Eigen::VectorXd(d.x().col(0)), Eigen::VectorXd(d.w().col(0)), d.y());
          },
          py::arg("n"), py::arg("seed"), "Draw (x, w, y) arrays; fully determined by the seed.");

  m.def("default_eval_points", []() { return Eigen::VectorXd(default_eval_points().col(0)); });

  m.def("estimate_kernel", &estimate_kernel, py::arg("x"), py::arg("w"), py::arg("y"),
        py::arg("z") = py::none(), py::arg("z0") = py::none(), py::arg("h") = 0.2, py::arg("h_z") = 0.2,
        py::arg("a") = 0.1, py::arg("grid_size") = 65, py::arg("w_grid_size") = 0,
        py::arg("scheme") = "gauss", py::arg("boundary") = "plain", py::arg("kernel") = "epanechnikov",
        py::arg("eval_points") = py::none(),
        "Ridge-regularized kernel estimate of g; pass z and z0 for the multivariate case.");

  m.def("estimate_series", &estimate_series, py::arg("x"), py::arg("w"), py::arg("y"),
        py::arg("m") = py::none(), py::arg("band") = py::none(), py::arg("a") = 0.1,
        py::arg("eval_points") = py::none(), "Orthogonal-series estimate with the cosine basis.");

  m.def("ecdf_transform", [](const py::array_t<double>& s) { return ecdf_transform(as_vector(s)); });

  m.def("estimation_band",
        [](const Eigen::MatrixXd& replicates, const Eigen::VectorXd& truth, double level) {
          return estimation_band(replicates, truth, level);
        },
        py::arg("replicates"), py::arg("truth"), py::arg("level") = 0.95);

  m.def("simulate", &simulate, py::arg("n") = 200, py::arg("reps") = 1000, py::arg("cells") = py::none(),
        py::arg("seed") = 20050101, py::arg("estimator") = "kernel", py::arg("boundary") = "plain",
        py::arg("grid_size") = 65, py::arg("series_m") = 0, py::arg("series_band") = 0,
        py::arg("level") = 0.95, py::arg("threads") = 1,
        "Monte Carlo study on the built-in design; cells is a list of (a, h).");

  m.def("rate_study", &rate_study_py, py::arg("sizes") = std::vector<Eigen::Index>{100, 200, 400, 800},
        py::arg("reps") = 300, py::arg("seed") = 20050101, py::arg("gamma") = 7.0 / 24.0,
        py::arg("a_ref") = 0.10, py::arg("h_ref") = 0.30, py::arg("boundary") = "plain",
        py::arg("grid_size") = 65, py::arg("threads") = 1);

  m.def("spectrum_design",
        [](int grid_size, int w_grid_size) {
          const Dgp dgp;
          return discretize_density([&](double x, double w) { return dgp.density(x, w); },
                                    grid_options(grid_size, w_grid_size, "gauss"), 0.1)
              .spectrum()
              .values;
        },
        py::arg("grid_size") = 129, py::arg("w_grid_size") = 0,
        "Eigenvalues of the exact design operator, descending.");

  m.def("spectrum_data", &spectrum_of_data, py::arg("x"), py::arg("w"), py::arg("h") = 0.2,
        py::arg("a") = 0.1, py::arg("grid_size") = 65, py::arg("w_grid_size") = 0,
        py::arg("boundary") = "plain", "Eigenvalues of the estimated operator, descending.");

  m.def("decay_exponent", &fit_decay_exponent, py::arg("eigenvalues"), py::arg("first") = 1,
        py::arg("last") = 20);
}
