#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "npiv/dataset.hpp"
#include "npiv/kernel_iv.hpp"
#include "npiv/monte_carlo.hpp"
#include "npiv/operator.hpp"
#include "npiv/series_iv.hpp"

namespace npiv {

struct CsvDataset {
  Dataset data;
  std::vector<std::string> warnings;  // e.g. ignored columns
};

// Delimited text with a header naming x, w, y and optionally z1..zq; other
// columns are ignored with a warning. LF or CRLF line endings. Throws
// InputError with a 1-based line number on malformed input.
CsvDataset read_dataset_csv(std::istream& in);
CsvDataset read_dataset_csv(const std::string& path);

void write_dataset_csv(std::ostream& out, const Dataset& data);

// Shortest round-trip decimal text for a double.
std::string format_number(double value);

// "x,estimate" rows preceded by "# key: value" diagnostic lines.
void write_estimate_csv(std::ostream& out, const Estimate& estimate, const std::string& estimator);
std::string estimate_json(const Estimate& estimate, const std::string& estimator,
                          const SeriesFit* fit = nullptr);

// One row per cell: a,h,bias2,var,mse.
void write_mc_csv(std::ostream& out, const McReport& report);
std::string mc_json(const McReport& report);

// x,g,mean,lower,upper for one cell of a report; lower/upper = g -/+ band.
void write_band_csv(std::ostream& out, const McReport& report, std::size_t cell);
void write_band_svg(std::ostream& out, const McReport& report, std::size_t cell);

void write_rate_csv(std::ostream& out, const RateStudyReport& report);
std::string rate_json(const RateStudyReport& report);

struct SpectrumTable {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd analytic;  // empty unless known
  double decay_exponent = 0.0;
  int fit_first = 1;
  int fit_last = 1;
};

void write_spectrum_csv(std::ostream& out, const SpectrumTable& table);
std::string spectrum_json(const SpectrumTable& table);

}  // namespace npiv
