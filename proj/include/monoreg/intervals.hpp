#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "monoreg/grid.hpp"
#include "monoreg/immersion.hpp"
#include "monoreg/posterior.hpp"

namespace monoreg {

enum class Sided { two_sided_equal_tail, upper_one_sided };

/// Pointwise interval from posterior draws. lower may be -infinity for
/// one-sided intervals.
struct CredibleInterval {
  double lower;
  double upper;
  double credibility;
  ImmersionKind kind;
  Eigen::VectorXd x0;
};

/// Monte Carlo sample of an immersed functional at a point. For the average
/// kind, the lower and upper map values are kept jointly per draw.
struct ImmersionDraws {
  ImmersionKind kind;
  Eigen::VectorXd x0;
  Eigen::ArrayXd values;
  Eigen::ArrayXd lower_values;  // filled for kind == average
  Eigen::ArrayXd upper_values;  // filled for kind == average
};

/// Empirical CDF of Z_B^{(kind)}; the recalibration reference table.
struct ZbTable {
  int kind = 1;
  int d = 1;
  std::vector<int> beta;
  Eigen::ArrayXd z;    // increasing grid on [0,1]
  Eigen::ArrayXd cdf;  // nondecreasing, in [0,1]

  /// F(z) by linear interpolation; throws std::out_of_range beyond the grid.
  double cdf_at(double z) const;
  /// inf{z : F(z) >= p}, linearly interpolated; throws std::out_of_range if p
  /// is outside [F(z_min), F(z_max)].
  double quantile(double p) const;

  static ZbTable from_samples(const Eigen::ArrayXd& samples, int kind, int d,
                              std::vector<int> beta, double z_step = 0.001);

  /// CSV schema: header `kind,d,beta,z,cdf`, beta hyphen-joined (e.g. "1-3").
  static void write_csv(const std::string& path, const std::vector<ZbTable>& tables);
  static ZbTable load_csv(const std::string& path, int kind, const std::vector<int>& beta);
};

/// Linear interpolation of order statistics (the common type-7 rule).
double quantile_type7(const Eigen::ArrayXd& sorted_values, double p);

/// Samples the posterior, pushes each draw through the immersion map at x0.
ImmersionDraws immersion_draws_at(const RegressionDataset& data, const GridSpec& grid,
                                  const PriorSpec& prior, const Eigen::VectorXd& x0,
                                  ImmersionKind kind, long n_draws, std::uint64_t seed,
                                  int workers = 1);

/// Equal-tail [q_{g/2}, q_{1-g/2}] or one-sided (-inf, q_{1-g}], g = 1 - credibility.
CredibleInterval credible_interval(const ImmersionDraws& draws, double credibility,
                                   Sided sided);

/// Credibility level whose limiting coverage equals target_coverage under the
/// table. Kind-3 two-sided uses the closed form 1 - 2 F^{-1}(alpha/2); other
/// kinds solve the coverage identity by bisection.
double recalibrate_level(double target_coverage, const ZbTable& table, Sided sided);

/// Forward map: limiting coverage of a credible interval at the given credibility.
double coverage_of_level(double credibility, const ZbTable& table, Sided sided);

}  // namespace monoreg
