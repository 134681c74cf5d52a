#pragma once

#include <Eigen/Core>

#include "monoreg/grid.hpp"

namespace monoreg {

/// Frequentist block max-min / min-max estimates on raw data points.
struct DhzEstimate {
  double f_minus;
  double f_plus;
  double f_hat;  // (f_minus + f_plus) / 2
  long block_count;
  Eigen::VectorXd u_hat;  // argmax lower corner of f_minus
  Eigen::VectorXd v_hat;  // argmin upper corner of f_plus
};

/// Corner candidates are the per-axis sorted distinct observed coordinates
/// plus x0; the continuous max-min is attained on this finite set.
/// block_count counts the points in [u_hat : v_hat].
DhzEstimate dhz_estimate(const RegressionDataset& data, const Eigen::VectorXd& x0);

struct DhzInterval {
  double lower;
  double upper;
};

/// Pivotal interval f_hat +- c_gamma sigma_hat / sqrt(block_count).
DhzInterval dhz_interval(const DhzEstimate& est, double sigma_hat, double c_gamma);

}  // namespace monoreg
