#include "npiv/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "npiv/errors.hpp"

namespace npiv {
namespace {

using json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& message) {
  throw InputError("line " + std::to_string(line) + ": " + message);
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v[i]));
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

CsvDataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw InputError("input is empty: expected a header row with x,w,y");

  std::optional<std::size_t> col_x, col_w, col_y;
  std::map<int, std::size_t> col_z;
  std::vector<std::string> warnings;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "x") col_x = c;
    else if (name == "w") col_w = c;
    else if (name == "y") col_y = c;
    else if (name.size() > 1 && name[0] == 'z' &&
             std::all_of(name.begin() + 1, name.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
      col_z[std::stoi(name.substr(1))] = c;
    else
      warnings.push_back("ignoring column '" + name + "'");
  }
  if (!col_x || !col_w || !col_y)
    fail_at(line_no, "header must name the columns x, w and y");
  int expected = 1;
  for (const auto& [index, column] : col_z) {
    if (index != expected) fail_at(line_no, "z columns must be numbered z1..zq without gaps");
    ++expected;
  }

  std::vector<double> xs, ws, ys;
  std::vector<std::vector<double>> zs;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size())
      fail_at(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    auto parse = [&](std::size_t column) {
      const std::string& text = fields[column];
      double value = 0.0;
      const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
      if (text.empty() || result.ec != std::errc() || result.ptr != text.data() + text.size() ||
          !std::isfinite(value))
        fail_at(line_no, "cannot parse '" + text + "' in column " + header[column]);
      return value;
    };
    auto parse_unit = [&](std::size_t column) {
      const double value = parse(column);
      if (value < 0.0 || value > 1.0)
        fail_at(line_no, "column " + header[column] + " value " + fields[column] +
                             " lies outside [0, 1]");
      return value;
    };
    xs.push_back(parse_unit(*col_x));
    ws.push_back(parse_unit(*col_w));
    ys.push_back(parse(*col_y));
    std::vector<double> z;
    for (const auto& [index, column] : col_z) z.push_back(parse_unit(column));
    zs.push_back(std::move(z));
  }
  if (ys.empty()) throw InputError("input has a header but no data rows");

  const auto n = static_cast<Eigen::Index>(ys.size());
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xs.data(), n);
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(ws.data(), n);
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  std::optional<Eigen::MatrixXd> z;
  if (!col_z.empty()) {
    z = Eigen::MatrixXd(n, static_cast<Eigen::Index>(col_z.size()));
    for (Eigen::Index i = 0; i < n; ++i)
      for (std::size_t c = 0; c < col_z.size(); ++c) (*z)(i, static_cast<Eigen::Index>(c)) = zs[i][c];
  }
  return {Dataset(Eigen::MatrixXd(x), Eigen::MatrixXd(w), y, std::move(z)), std::move(warnings)};
}

CsvDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  if (data.dim_x() != 1) throw InputError("CSV output supports scalar x and w only");
  out << "x,w,y";
  for (Eigen::Index c = 0; c < data.dim_z(); ++c) out << ",z" << c + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << format_number(data.x()(i, 0)) << ',' << format_number(data.w()(i, 0)) << ','
        << format_number(data.y()[i]);
    for (Eigen::Index c = 0; c < data.dim_z(); ++c) out << ',' << format_number(data.z()(i, c));
    out << '\n';
  }
}

void write_estimate_csv(std::ostream& out, const Estimate& estimate, const std::string& estimator) {
  const EstimateDiagnostics& d = estimate.diagnostics;
  out << "# estimator: " << estimator << '\n';
  out << "# ridge: " << format_number(d.ridge) << '\n';
  if (d.bandwidth > 0.0) out << "# bandwidth: " << format_number(d.bandwidth) << '\n';
  if (d.bandwidth_z > 0.0) out << "# bandwidth_z: " << format_number(d.bandwidth_z) << '\n';
  if (!d.leading_eigenvalues.empty()) {
    out << "# leading_eigenvalues:";
    for (double v : d.leading_eigenvalues) out << ' ' << format_number(v);
    out << '\n' << "# effective_dof: " << format_number(d.effective_dof) << '\n';
  }
  if (d.sparse_locality) out << "# warning: no observation has Z within bandwidth of z0\n";
  if (d.ill_determined) out << "# warning: more basis terms than observations\n";
  const Eigen::Index dim = estimate.points.cols();
  if (dim == 1) {
    out << "x";
  } else {
    for (Eigen::Index c = 0; c < dim; ++c) out << (c ? "," : "") << 'x' << c + 1;
  }
  out << ",estimate\n";
  for (Eigen::Index r = 0; r < estimate.points.rows(); ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) out << format_number(estimate.points(r, c)) << ',';
    out << format_number(estimate.values[r]) << '\n';
  }
}

std::string estimate_json(const Estimate& estimate, const std::string& estimator,
                          const SeriesFit* fit) {
  const EstimateDiagnostics& d = estimate.diagnostics;
  json points = json::array();
  for (Eigen::Index r = 0; r < estimate.points.rows(); ++r)
    points.push_back(to_vector(estimate.points.row(r).transpose()));
  json diag = {{"ridge", d.ridge},
               {"bandwidth", d.bandwidth},
               {"bandwidth_z", d.bandwidth_z},
               {"leading_eigenvalues", d.leading_eigenvalues},
               {"effective_dof", d.effective_dof},
               {"sparse_locality", d.sparse_locality},
               {"ill_determined", d.ill_determined}};
  json out = {{"estimator", estimator},
              {"points", points},
              {"values", vector_json(estimate.values)},
              {"diagnostics", diag}};
  if (fit) {
    json q = json::array();
    for (Eigen::Index r = 0; r < fit->q_hat.rows(); ++r) q.push_back(to_vector(fit->q_hat.row(r).transpose()));
    out["series"] = {{"m", fit->m},
                     {"band", fit->band},
                     {"gamma_hat", to_vector(fit->gamma_hat)},
                     {"p_hat", to_vector(fit->p_hat)},
                     {"q_hat", q}};
  }
  return out.dump(2) + "\n";
}

void write_mc_csv(std::ostream& out, const McReport& report) {
  out << "a,h,bias2,var,mse\n";
  for (const McCellReport& cell : report.cells)
    out << format_number(cell.cell.a) << ',' << format_number(cell.cell.h) << ','
        << format_number(cell.bias2) << ',' << format_number(cell.var) << ','
        << format_number(cell.mse) << '\n';
}

std::string mc_json(const McReport& report) {
  const McConfig& c = report.config;
  json cells = json::array();
  for (const McCellReport& cell : report.cells) {
    cells.push_back({{"a", cell.cell.a},
                     {"h", cell.cell.h},
                     {"bias2", number_or_null(cell.bias2)},
                     {"var", number_or_null(cell.var)},
                     {"mse", number_or_null(cell.mse)},
                     {"failures", cell.failures},
                     {"failure_messages", cell.failure_messages},
                     {"mean", vector_json(cell.mean)},
                     {"point_bias2", vector_json(cell.point_bias2)},
                     {"point_var", vector_json(cell.point_var)},
                     {"point_mse", vector_json(cell.point_mse)},
                     {"band_half_width", vector_json(cell.band)}});
  }
  json out = {{"provenance",
               {{"base_seed", c.base_seed}, {"config_hash", report.config_hash}}},
              {"config",
               {{"n", c.n},
                {"reps", c.reps},
                {"estimator", std::string(to_string(c.estimator))},
                {"boundary", std::string(to_string(c.boundary))},
                {"kernel", std::string(to_string(c.kernel))},
                {"grid_size", c.grid.grid_size},
                {"band_level", c.band_level}}},
              {"eval_points", to_vector(report.eval_points)},
              {"truth", to_vector(report.truth)},
              {"cells", cells}};
  return out.dump(2) + "\n";
}

void write_band_csv(std::ostream& out, const McReport& report, std::size_t cell) {
  const McCellReport& c = report.cells.at(cell);
  out << "x,g,mean,lower,upper\n";
  for (Eigen::Index j = 0; j < report.eval_points.size(); ++j)
    out << format_number(report.eval_points[j]) << ',' << format_number(report.truth[j]) << ','
        << format_number(c.mean[j]) << ',' << format_number(report.truth[j] - c.band[j]) << ','
        << format_number(report.truth[j] + c.band[j]) << '\n';
}

void write_band_svg(std::ostream& out, const McReport& report, std::size_t cell) {
  const McCellReport& c = report.cells.at(cell);
  const Eigen::VectorXd lower = report.truth - c.band;
  const Eigen::VectorXd upper = report.truth + c.band;
  double y_min = std::min({lower.minCoeff(), c.mean.minCoeff(), 0.0});
  double y_max = std::max({upper.maxCoeff(), c.mean.maxCoeff()});
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const double width = 640, height = 420, left = 60, right = 20, top = 30, bottom = 50;
  auto px = [&](double x) { return left + x * (width - left - right); };
  auto py = [&](double y) { return top + (y_max - y) / (y_max - y_min) * (height - top - bottom); };
  auto polyline = [&](const Eigen::VectorXd& ys, const char* style) {
    out << "  <polyline fill=\"none\" stroke=\"black\" " << style << " points=\"";
    for (Eigen::Index j = 0; j < ys.size(); ++j)
      out << (j ? " " : "") << format_number(px(report.eval_points[j])) << ','
          << format_number(py(ys[j]));
    out << "\"/>\n";
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << "estimation band, a = " << format_number(c.cell.a) << ", h = " << format_number(c.cell.h)
      << "</text>\n";
  out << "  <line x1=\"" << px(0) << "\" y1=\"" << py(y_min) << "\" x2=\"" << px(1) << "\" y2=\""
      << py(y_min) << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << px(0) << "\" y1=\"" << py(y_min) << "\" x2=\"" << px(0) << "\" y2=\""
      << py(y_max) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 10; k += 2) {
    const double x = k / 10.0;
    out << "  <text x=\"" << px(x) << "\" y=\"" << height - bottom + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << format_number(x) << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = y_min + (y_max - y_min) * k / 4.0;
    char label[32];
    std::snprintf(label, sizeof label, "%.2f", y);
    out << "  <text x=\"" << left - 6 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
  }
  polyline(report.truth, "stroke-width=\"2\"");
  polyline(c.mean, "stroke-width=\"1.5\" stroke-dasharray=\"8,4\"");
  polyline(lower, "stroke-width=\"1\" stroke-dasharray=\"2,3\"");
  polyline(upper, "stroke-width=\"1\" stroke-dasharray=\"2,3\"");
  out << "</svg>\n";
}

void write_rate_csv(std::ostream& out, const RateStudyReport& report) {
  out << "# target_exponent: " << format_number(report.target) << '\n';
  out << "# slope: " << format_number(report.slope) << '\n';
  out << "# slope_stderr: " << format_number(report.slope_stderr) << '\n';
  out << "n,a,h,mise,failures\n";
  for (const RatePoint& p : report.points)
    out << p.n << ',' << format_number(p.a) << ',' << format_number(p.h) << ','
        << format_number(p.mise) << ',' << p.failures << '\n';
}

std::string rate_json(const RateStudyReport& report) {
  json points = json::array();
  for (const RatePoint& p : report.points)
    points.push_back({{"n", p.n}, {"a", p.a}, {"h", p.h}, {"mise", number_or_null(p.mise)}, {"failures", p.failures}});
  json out = {{"target_exponent", report.target},
              {"slope", number_or_null(report.slope)},
              {"slope_stderr", number_or_null(report.slope_stderr)},
              {"points", points}};
  return out.dump(2) + "\n";
}

void write_spectrum_csv(std::ostream& out, const SpectrumTable& table) {
  out << "# decay_exponent: " << format_number(table.decay_exponent) << " (fit over j = "
      << table.fit_first << ".." << table.fit_last << ")\n";
  out << (table.analytic.size() ? "j,eigenvalue,analytic\n" : "j,eigenvalue\n");
  for (Eigen::Index j = 0; j < table.eigenvalues.size(); ++j) {
    out << j + 1 << ',' << format_number(table.eigenvalues[j]);
    if (table.analytic.size()) out << ',' << format_number(table.analytic[j]);
    out << '\n';
  }
}

std::string spectrum_json(const SpectrumTable& table) {
  json out = {{"decay_exponent", table.decay_exponent},
              {"fit_range", {table.fit_first, table.fit_last}},
              {"eigenvalues", to_vector(table.eigenvalues)}};
  if (table.analytic.size()) out["analytic"] = to_vector(table.analytic);
  return out.dump(2) + "\n";
}

}  // namespace npiv
