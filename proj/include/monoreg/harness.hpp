#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "monoreg/grid.hpp"
#include "monoreg/immersion.hpp"
#include "monoreg/intervals.hpp"
#include "monoreg/posterior.hpp"

namespace monoreg {

/// Full description of one coverage experiment.
struct StudyConfig {
  std::string function = "f2";  // f1..f5
  long n = 200;
  double sigma = 1.0;
  int d = 2;
  Eigen::VectorXd x0;             // defaults to (0.5, ..., 0.5)
  std::optional<int> cells_per_axis;  // grid rule default when absent
  // Grid for the marginal-MLE variance estimate. On a fine posterior grid the
  // within-cell residuals absorb part of the signal and the MMLE biases low,
  // so sigma^2 is estimated on a coarser lattice: floor((n/3)^(1/d)) cells per
  // axis by default, i.e. at least three observations per cell on average.
  std::optional<int> sigma_cells_per_axis;
  double zeta = 0.0;
  double lambda2 = 1000.0;
  VarianceMode variance_mode = MmlePlugin{};
  ImmersionKind kind = ImmersionKind::average;
  double level = 0.05;  // gamma; credibility = 1 - level
  bool recalibrate = false;
  std::string table_path;  // Z_B table CSV, required when recalibrate
  std::vector<int> beta;   // table lookup key, defaults to 1 per axis
  long replications = 500;
  long draws = 2000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::map<double, double> c_gamma;  // DHZ critical values by level

  void validate() const;
  Eigen::VectorXd x0_or_default() const;
  std::vector<int> beta_or_default() const;
  GridSpec make_grid() const;
  GridSpec make_sigma_grid() const;
};

/// key = value file, '#' comments. Unknown keys are rejected.
StudyConfig parse_study_config(const std::string& path);

/// The five simulation-study regression functions (d = 2).
double true_function(const std::string& id, const Eigen::VectorXd& x);

/// n iid points, X uniform on [0,1]^d, y = f(x) + sigma * N(0,1).
RegressionDataset generate_dataset(const StudyConfig& config, std::uint64_t seed);

/// One results-table row.
struct StudyRow {
  std::string function;
  long n;
  double level;
  std::string method;  // IB, IB_adj, DHZ
  double coverage_pct;
  double mean_length;
  double sd_length;
};

/// Runs the replication loop for the immersion credible interval; when the
/// config asks for recalibration, the adjusted interval is computed from the
/// same draws and reported as a second row.
std::vector<StudyRow> coverage_study(const StudyConfig& config);

/// DHZ baseline rows, one per configured c_gamma level.
std::vector<StudyRow> dhz_study(const StudyConfig& config);

/// CSV with header `x1,...,xd,y`. Malformed rows are reported with line numbers.
RegressionDataset load_csv(const std::string& path);
void write_csv(const RegressionDataset& data, const std::string& path);

void emit_json(const std::vector<StudyRow>& rows, const std::string& path);

}  // namespace monoreg
