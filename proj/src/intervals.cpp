#include "monoreg/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "monoreg/errors.hpp"
#include "monoreg/parallel.hpp"

namespace monoreg {

namespace {

std::string beta_tag(const std::vector<int>& beta) {
  std::string s;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (k) s += '-';
    s += std::to_string(beta[k]);
  }
  return s;
}

std::vector<int> parse_beta_tag(const std::string& s) {
  std::vector<int> beta;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, '-')) beta.push_back(std::stoi(part));
  return beta;
}

}  // namespace

double ZbTable::cdf_at(double zq) const {
  if (z.size() < 2) throw std::out_of_range("ZbTable: too few nodes");
  if (zq < z[0] || zq > z[z.size() - 1]) throw std::out_of_range("ZbTable: z outside table support");
  // z grid is uniform-ish but search to be safe.
  const double* begin = z.data();
  const double* end = z.data() + z.size();
  const double* it = std::lower_bound(begin, end, zq);
  long i = it - begin;
  if (i == 0) return cdf[0];
  double z0 = z[i - 1], z1 = z[i];
  double t = (zq - z0) / (z1 - z0);
  return cdf[i - 1] + t * (cdf[i] - cdf[i - 1]);
}

double ZbTable::quantile(double p) const {
  if (z.size() < 2) throw std::out_of_range("ZbTable: too few nodes");
  if (p < cdf[0] || p > cdf[cdf.size() - 1]) {
    throw std::out_of_range("ZbTable: probability outside table support");
  }
  // First node with F >= p.
  long i = 0;
  while (cdf[i] < p) ++i;
  if (i == 0) return z[0];
  if (cdf[i] == cdf[i - 1]) return z[i];
  double t = (p - cdf[i - 1]) / (cdf[i] - cdf[i - 1]);
  return z[i - 1] + t * (z[i] - z[i - 1]);
}

ZbTable ZbTable::from_samples(const Eigen::ArrayXd& samples, int kind, int d,
                              std::vector<int> beta, double z_step) {
  if (samples.size() < 1) throw std::invalid_argument("ZbTable: no samples");
  std::vector<double> sorted(samples.data(), samples.data() + samples.size());
  std::sort(sorted.begin(), sorted.end());
  long nodes = static_cast<long>(std::lround(1.0 / z_step)) + 1;
  ZbTable t;
  t.kind = kind;
  t.d = d;
  t.beta = std::move(beta);
  t.z.resize(nodes);
  t.cdf.resize(nodes);
  const double n = static_cast<double>(sorted.size());
  for (long i = 0; i < nodes; ++i) {
    double zi = static_cast<double>(i) * z_step;
    t.z[i] = zi;
    auto it = std::upper_bound(sorted.begin(), sorted.end(), zi);
    t.cdf[i] = static_cast<double>(it - sorted.begin()) / n;
  }
  return t;
}

void ZbTable::write_csv(const std::string& path, const std::vector<ZbTable>& tables) {
  std::ofstream out(path);
  if (!out) throw DataError("ZbTable: cannot open " + path + " for writing");
  out << "kind,d,beta,z,cdf\n";
  out.precision(17);
  for (const auto& t : tables) {
    std::string tag = beta_tag(t.beta);
    for (long i = 0; i < t.z.size(); ++i) {
      out << t.kind << ',' << t.d << ',' << tag << ',' << t.z[i] << ',' << t.cdf[i] << '\n';
    }
  }
}

ZbTable ZbTable::load_csv(const std::string& path, int kind, const std::vector<int>& beta) {
  std::ifstream in(path);
  if (!in) throw DataError("ZbTable: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("ZbTable: empty file " + path);
  if (line != "kind,d,beta,z,cdf") throw DataError("ZbTable: bad header in " + path);
  std::vector<double> zs, cdfs;
  int d = 0;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f_kind, f_d, f_beta, f_z, f_cdf;
    if (!std::getline(ss, f_kind, ',') || !std::getline(ss, f_d, ',') ||
        !std::getline(ss, f_beta, ',') || !std::getline(ss, f_z, ',') ||
        !std::getline(ss, f_cdf, ',')) {
      throw DataError("ZbTable: malformed row at line " + std::to_string(lineno));
    }
    if (std::stoi(f_kind) != kind) continue;
    if (parse_beta_tag(f_beta) != beta) continue;
    d = std::stoi(f_d);
    zs.push_back(std::stod(f_z));
    cdfs.push_back(std::stod(f_cdf));
  }
  if (zs.empty()) {
    throw DataError("ZbTable: no rows for kind " + std::to_string(kind) + ", beta " +
                    beta_tag(beta) + " in " + path);
  }
  ZbTable t;
  t.kind = kind;
  t.d = d;
  t.beta = beta;
  t.z = Eigen::Map<Eigen::ArrayXd>(zs.data(), static_cast<long>(zs.size()));
  t.cdf = Eigen::Map<Eigen::ArrayXd>(cdfs.data(), static_cast<long>(cdfs.size()));
  for (long i = 1; i < t.z.size(); ++i) {
    if (t.z[i] <= t.z[i - 1] || t.cdf[i] < t.cdf[i - 1]) {
      throw DataError("ZbTable: z/cdf not monotone in " + path);
    }
  }
  return t;
}

double quantile_type7(const Eigen::ArrayXd& sorted_values, double p) {
  const long n = sorted_values.size();
  if (n == 0) throw std::invalid_argument("quantile_type7: empty sample");
  if (p <= 0.0) return sorted_values[0];
  if (p >= 1.0) return sorted_values[n - 1];
  double h = static_cast<double>(n - 1) * p;
  long lo = static_cast<long>(std::floor(h));
  double frac = h - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted_values[n - 1];
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

ImmersionDraws immersion_draws_at(const RegressionDataset& data, const GridSpec& grid,
                                  const PriorSpec& prior, const Eigen::VectorXd& x0,
                                  ImmersionKind kind, long n_draws, std::uint64_t seed,
                                  int workers) {
  if (n_draws < 2) throw std::invalid_argument("immersion_draws_at: n_draws must be >= 2");
  BinStats stats(data, grid);
  PosteriorParams params = make_posterior(stats, prior, data);
  CellIndex j0 = bin_index(x0, grid);

  ImmersionDraws out;
  out.kind = kind;
  out.x0 = x0;
  out.values.resize(n_draws);
  const bool joint = kind == ImmersionKind::average;
  if (joint) {
    out.lower_values.resize(n_draws);
    out.upper_values.resize(n_draws);
  }
  parallel_for(n_draws, workers, [&](long i) {
    Eigen::ArrayXd theta;
    sample_theta_draw(params, seed, i, theta);
    WeightedBlockMeans w(stats, theta);
    if (joint) {
      double lo = iota_lower_cell(w, j0);
      double hi = iota_upper_cell(w, j0);
      out.lower_values[i] = lo;
      out.upper_values[i] = hi;
      out.values[i] = 0.5 * (lo + hi);
    } else {
      out.values[i] = iota_cell(kind, w, j0);
    }
  });
  return out;
}

CredibleInterval credible_interval(const ImmersionDraws& draws, double credibility,
                                   Sided sided) {
  if (draws.values.size() == 0) throw std::invalid_argument("credible_interval: empty draws");
  if (!(credibility > 0.0 && credibility < 1.0)) {
    throw std::invalid_argument("credible_interval: credibility must lie in (0,1)");
  }
  Eigen::ArrayXd sorted = draws.values;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  double gamma = 1.0 - credibility;
  CredibleInterval ci;
  ci.credibility = credibility;
  ci.kind = draws.kind;
  ci.x0 = draws.x0;
  if (sided == Sided::two_sided_equal_tail) {
    ci.lower = quantile_type7(sorted, gamma / 2.0);
    ci.upper = quantile_type7(sorted, 1.0 - gamma / 2.0);
  } else {
    ci.lower = -std::numeric_limits<double>::infinity();
    ci.upper = quantile_type7(sorted, 1.0 - gamma);
  }
  return ci;
}

double coverage_of_level(double credibility, const ZbTable& table, Sided sided) {
  if (!(credibility > 0.0 && credibility < 1.0)) {
    throw std::invalid_argument("coverage_of_level: credibility must lie in (0,1)");
  }
  if (sided == Sided::upper_one_sided) return table.cdf_at(credibility);
  double gamma = 1.0 - credibility;
  return table.cdf_at(1.0 - gamma / 2.0) - table.cdf_at(gamma / 2.0);
}

double recalibrate_level(double target_coverage, const ZbTable& table, Sided sided) {
  if (!(target_coverage > 0.0 && target_coverage < 1.0)) {
    throw std::invalid_argument("recalibrate_level: target must lie in (0,1)");
  }
  if (sided == Sided::upper_one_sided) return table.quantile(target_coverage);
  if (table.kind == 3) {
    double alpha = 1.0 - target_coverage;
    return 1.0 - 2.0 * table.quantile(alpha / 2.0);
  }
  // Coverage is monotone decreasing in gamma; bisect on gamma.
  double lo = 1e-9, hi = 1.0 - 1e-9;
  double cov_lo = coverage_of_level(1.0 - lo, table, sided);
  double cov_hi = coverage_of_level(1.0 - hi, table, sided);
  if (target_coverage > cov_lo || target_coverage < cov_hi) {
    throw std::out_of_range("recalibrate_level: target outside table support");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (coverage_of_level(1.0 - mid, table, sided) >= target_coverage) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 1.0 - 0.5 * (lo + hi);
}

}  // namespace monoreg
