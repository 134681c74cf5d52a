#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <utility>
#include <variant>

#include "monoreg/grid.hpp"

namespace monoreg {

/// sigma^2 is known and held fixed.
struct FixedSigma {
  double sigma2;
};
/// sigma^2 is the marginal MLE plug-in.
struct MmlePlugin {};
/// Fully Bayesian: sigma^2 ~ IG(b1, b2) a priori, drawn fresh per posterior draw.
/// Parameterization is shape-scale with density proportional to
/// x^{-(shape+1)} exp(-scale/x).
struct InverseGamma {
  double b1;
  double b2;
};
using VarianceMode = std::variant<FixedSigma, MmlePlugin, InverseGamma>;

/// Independent Gaussian prior N(zeta_j, sigma^2 lambda2_j) per cell.
/// lambda2_j may be +infinity (flat prior).
struct PriorSpec {
  Eigen::ArrayXd zeta;
  Eigen::ArrayXd lambda2;
  VarianceMode variance_mode = MmlePlugin{};

  static PriorSpec broadcast(const GridSpec& grid, double zeta, double lambda2,
                             VarianceMode mode = MmlePlugin{});
  void validate(const GridSpec& grid) const;
};

/// Marginal maximum-likelihood estimate of the error variance,
/// clamped below at 1e-12 against floating-point cancellation.
double sigma2_mmle(const BinStats& stats, const PriorSpec& prior,
                   const RegressionDataset& data);

/// Inverse-Gamma posterior parameters (b1 + n/2, b2 + n sigma2_hat / 2).
std::pair<double, double> sigma2_posterior_params(double b1, double b2, long n,
                                                  double sigma2_hat);

/// How sigma^2 is produced for each posterior draw.
struct Sigma2Rule {
  double constant = 1.0;
  bool inverse_gamma = false;
  double shape = 0.0;
  double scale = 0.0;

  double draw(std::mt19937_64& rng) const;
};

/// Per-cell conjugate posterior: theta_j ~ N(mean_j, sigma^2 var_scale_j).
/// Cells with no data reduce exactly to the prior.
struct PosteriorParams {
  GridSpec grid;
  Eigen::ArrayXd mean;
  Eigen::ArrayXd var_scale;  // posterior variance divided by sigma^2
  Sigma2Rule sigma2_rule;
};

/// Conjugate update given a sigma^2 estimate and the prior's variance mode.
PosteriorParams posterior_params(const BinStats& stats, const PriorSpec& prior,
                                 double sigma2_hat);

/// Convenience: estimates sigma^2 per the prior's variance mode, then updates.
PosteriorParams make_posterior(const BinStats& stats, const PriorSpec& prior,
                               const RegressionDataset& data);

/// Writes draw number `draw_index` into `out`. Each draw uses the substream
/// keyed by its index, so any parallel schedule reproduces the same matrix.
void sample_theta_draw(const PosteriorParams& params, std::uint64_t seed,
                       long draw_index, Eigen::ArrayXd& out);

/// n_draws x total matrix of posterior draws of the step heights.
Eigen::MatrixXd sample_theta(const PosteriorParams& params, long n_draws,
                             std::uint64_t seed);

}  // namespace monoreg
