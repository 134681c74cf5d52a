#include "monoreg/posterior.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "monoreg/rng.hpp"

namespace monoreg {

namespace {
constexpr double kSigma2Floor = 1e-12;
}

PriorSpec PriorSpec::broadcast(const GridSpec& grid, double zeta, double lambda2,
                               VarianceMode mode) {
  PriorSpec p;
  p.zeta = Eigen::ArrayXd::Constant(grid.total(), zeta);
  p.lambda2 = Eigen::ArrayXd::Constant(grid.total(), lambda2);
  p.variance_mode = mode;
  p.validate(grid);
  return p;
}

void PriorSpec::validate(const GridSpec& grid) const {
  if (zeta.size() != grid.total() || lambda2.size() != grid.total()) {
    throw std::invalid_argument("PriorSpec: array size does not match grid");
  }
  for (long f = 0; f < lambda2.size(); ++f) {
    if (!(lambda2[f] > 0.0)) throw std::invalid_argument("PriorSpec: lambda2 must be positive");
    if (!std::isfinite(zeta[f])) throw std::invalid_argument("PriorSpec: zeta must be finite");
  }
  if (const auto* ig = std::get_if<InverseGamma>(&variance_mode)) {
    if (!(ig->b1 > 0.0) || !(ig->b2 > 0.0)) {
      throw std::invalid_argument("PriorSpec: inverse-gamma hyperparameters must be positive");
    }
  }
  if (const auto* fs = std::get_if<FixedSigma>(&variance_mode)) {
    if (!(fs->sigma2 > 0.0)) throw std::invalid_argument("PriorSpec: fixed sigma2 must be positive");
  }
}

double sigma2_mmle(const BinStats& stats, const PriorSpec& prior,
                   const RegressionDataset& data) {
  const long n = data.n();
  if (n < 1) throw std::invalid_argument("sigma2_mmle: empty dataset");
  prior.validate(stats.grid());

  double ss = 0.0;
  for (long i = 0; i < n; ++i) {
    long f = stats.grid().flat(bin_index(data.x().row(i).transpose(), stats.grid()));
    double r = data.y()[i] - prior.zeta[f];
    ss += r * r;
  }
  double shrink = 0.0;
  for (long f = 0; f < stats.grid().total(); ++f) {
    long nj = stats.count(f);
    if (nj == 0) continue;
    double ybar = stats.sum(f) / static_cast<double>(nj);
    double dev = ybar - prior.zeta[f];
    double inv_l2 = 1.0 / prior.lambda2[f];
    shrink += static_cast<double>(nj) * static_cast<double>(nj) * dev * dev /
              (static_cast<double>(nj) + inv_l2);
  }
  double s2 = (ss - shrink) / static_cast<double>(n);
  return std::max(s2, kSigma2Floor);
}

std::pair<double, double> sigma2_posterior_params(double b1, double b2, long n,
                                                  double sigma2_hat) {
  if (!(b1 > 0.0) || !(b2 > 0.0)) {
    throw std::invalid_argument("sigma2_posterior_params: hyperparameters must be positive");
  }
  return {b1 + static_cast<double>(n) / 2.0,
          b2 + static_cast<double>(n) * sigma2_hat / 2.0};
}

double Sigma2Rule::draw(std::mt19937_64& rng) const {
  if (!inverse_gamma) return constant;
  std::gamma_distribution<double> g(shape, 1.0);
  return scale / g(rng);
}

PosteriorParams posterior_params(const BinStats& stats, const PriorSpec& prior,
                                 double sigma2_hat) {
  prior.validate(stats.grid());
  PosteriorParams p{stats.grid(), Eigen::ArrayXd(stats.grid().total()),
                    Eigen::ArrayXd(stats.grid().total()), Sigma2Rule{}};
  for (long f = 0; f < stats.grid().total(); ++f) {
    double nj = static_cast<double>(stats.count(f));
    double inv_l2 = 1.0 / prior.lambda2[f];
    if (nj == 0.0 && inv_l2 == 0.0) {
      // Flat prior with no data: improper, keep the prior mean with infinite scale.
      p.mean[f] = prior.zeta[f];
      p.var_scale[f] = std::numeric_limits<double>::infinity();
      continue;
    }
    double denom = nj + inv_l2;
    double ybar_term = stats.sum(f);  // N_j * Ybar_j
    p.mean[f] = (ybar_term + prior.zeta[f] * inv_l2) / denom;
    p.var_scale[f] = 1.0 / denom;
  }
  if (const auto* fs = std::get_if<FixedSigma>(&prior.variance_mode)) {
    p.sigma2_rule.constant = fs->sigma2;
  } else if (std::holds_alternative<MmlePlugin>(prior.variance_mode)) {
    p.sigma2_rule.constant = sigma2_hat;
  } else {
    const auto& ig = std::get<InverseGamma>(prior.variance_mode);
    auto [shape, scale] = sigma2_posterior_params(ig.b1, ig.b2, stats.n(), sigma2_hat);
    p.sigma2_rule.inverse_gamma = true;
    p.sigma2_rule.shape = shape;
    p.sigma2_rule.scale = scale;
  }
  return p;
}

PosteriorParams make_posterior(const BinStats& stats, const PriorSpec& prior,
                               const RegressionDataset& data) {
  double s2 = 1.0;
  if (!std::holds_alternative<FixedSigma>(prior.variance_mode)) {
    s2 = sigma2_mmle(stats, prior, data);
  }
  return posterior_params(stats, prior, s2);
}

void sample_theta_draw(const PosteriorParams& params, std::uint64_t seed,
                       long draw_index, Eigen::ArrayXd& out) {
  auto rng = substream(seed, static_cast<std::uint64_t>(draw_index));
  double sigma2 = params.sigma2_rule.draw(rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  out.resize(params.mean.size());
  for (long f = 0; f < params.mean.size(); ++f) {
    double sd = std::sqrt(sigma2 * params.var_scale[f]);
    out[f] = params.mean[f] + sd * normal(rng);
  }
}

Eigen::MatrixXd sample_theta(const PosteriorParams& params, long n_draws,
                             std::uint64_t seed) {
  if (n_draws < 1) throw std::invalid_argument("sample_theta: n_draws must be >= 1");
  Eigen::MatrixXd draws(n_draws, params.mean.size());
  Eigen::ArrayXd row;
  for (long i = 0; i < n_draws; ++i) {
    sample_theta_draw(params, seed, i, row);
    draws.row(i) = row.transpose();
  }
  return draws;
}

}  // namespace monoreg
