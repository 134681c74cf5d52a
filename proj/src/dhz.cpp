#include "monoreg/dhz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace monoreg {

namespace {

struct CornerLattice {
  // Per-axis sorted distinct coordinates and the rank lattice of the points.
  std::vector<std::vector<double>> coords;
  std::vector<int> n_below;     // # distinct coords strictly < x0_k
  std::vector<int> n_at_most;   // # distinct coords <= x0_k
  GridSpec grid;
  PrefixTable counts;
  PrefixTable ysums;
};

CornerLattice build_lattice(const RegressionDataset& data, const Eigen::VectorXd& x0) {
  const int d = data.dim();
  std::vector<std::vector<double>> coords(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    auto& c = coords[static_cast<std::size_t>(k)];
    c.resize(static_cast<std::size_t>(data.n()));
    for (long i = 0; i < data.n(); ++i) c[static_cast<std::size_t>(i)] = data.x()(i, k);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::vector<int> cells(static_cast<std::size_t>(d));
  std::vector<int> below(static_cast<std::size_t>(d)), at_most(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    auto ku = static_cast<std::size_t>(k);
    cells[ku] = static_cast<int>(coords[ku].size());
    below[ku] = static_cast<int>(std::lower_bound(coords[ku].begin(), coords[ku].end(), x0[k]) -
                                 coords[ku].begin());
    at_most[ku] = static_cast<int>(std::upper_bound(coords[ku].begin(), coords[ku].end(), x0[k]) -
                                   coords[ku].begin());
  }
  GridSpec grid(cells);
  Eigen::ArrayXd cnt = Eigen::ArrayXd::Zero(grid.total());
  Eigen::ArrayXd ys = Eigen::ArrayXd::Zero(grid.total());
  CellIndex rank(static_cast<std::size_t>(d));
  for (long i = 0; i < data.n(); ++i) {
    for (int k = 0; k < d; ++k) {
      auto ku = static_cast<std::size_t>(k);
      rank[ku] = static_cast<int>(std::lower_bound(coords[ku].begin(), coords[ku].end(),
                                                   data.x()(i, k)) -
                                  coords[ku].begin());
    }
    long f = grid.flat(rank);
    cnt[f] += 1.0;
    ys[f] += data.y()[i];
  }
  return CornerLattice{std::move(coords), std::move(below), std::move(at_most), grid,
                       PrefixTable(grid, cnt), PrefixTable(grid, ys)};
}

// Odometer over the product of integer ranges [lo_k, hi_k].
template <typename F>
void for_each_threshold(const std::vector<int>& lo, const std::vector<int>& hi, F&& f) {
  const std::size_t d = lo.size();
  for (std::size_t k = 0; k < d; ++k) {
    if (lo[k] > hi[k]) return;  // empty range, no candidates
  }
  std::vector<int> t(lo);
  for (;;) {
    f(t);
    int k = static_cast<int>(d) - 1;
    for (; k >= 0; --k) {
      auto ku = static_cast<std::size_t>(k);
      if (++t[ku] <= hi[ku]) break;
      t[ku] = lo[ku];
    }
    if (k < 0) return;
  }
}

}  // namespace

DhzEstimate dhz_estimate(const RegressionDataset& data, const Eigen::VectorXd& x0) {
  if (data.n() < 1) throw std::runtime_error("dhz_estimate: empty dataset");
  if (x0.size() != data.dim()) throw std::invalid_argument("dhz_estimate: dimension mismatch");
  const int d = data.dim();
  CornerLattice lat = build_lattice(data, x0);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Lower thresholds: include ranks >= L_k, L_k in [0, n_below_k].
  // Upper thresholds: include ranks <= U_k, U_k in [n_at_most_k - 1, P_k - 1].
  std::vector<int> l_lo(static_cast<std::size_t>(d), 0), l_hi(lat.n_below);
  std::vector<int> u_lo(static_cast<std::size_t>(d)), u_hi(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    auto ku = static_cast<std::size_t>(k);
    u_lo[ku] = lat.n_at_most[ku] - 1;
    u_hi[ku] = lat.grid.cells()[ku] - 1;
  }

  auto block = [&](const std::vector<int>& L, const std::vector<int>& U,
                   double& mean_out) -> bool {
    CellIndex lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      auto ku = static_cast<std::size_t>(k);
      if (L[ku] > U[ku] || U[ku] < 0 || L[ku] >= lat.grid.cells()[ku]) return false;
      lo[ku] = L[ku];
      hi[ku] = U[ku];
    }
    double c = lat.counts.block_sum(lo, hi);
    if (c < 0.5) return false;
    mean_out = lat.ysums.block_sum(lo, hi) / c;
    return true;
  };

  double f_minus = -kInf, f_plus = kInf;
  std::vector<int> arg_l(static_cast<std::size_t>(d), 0), arg_u(u_hi);

  for_each_threshold(l_lo, l_hi, [&](const std::vector<int>& L) {
    double inner = kInf;
    for_each_threshold(u_lo, u_hi, [&](const std::vector<int>& U) {
      double m;
      if (block(L, U, m)) inner = std::min(inner, m);
    });
    if (inner < kInf && inner > f_minus) {
      f_minus = inner;
      arg_l = L;
    }
  });
  for_each_threshold(u_lo, u_hi, [&](const std::vector<int>& U) {
    double inner = -kInf;
    for_each_threshold(l_lo, l_hi, [&](const std::vector<int>& L) {
      double m;
      if (block(L, U, m)) inner = std::max(inner, m);
    });
    if (inner > -kInf && inner < f_plus) {
      f_plus = inner;
      arg_u = U;
    }
  });
  if (!(f_minus > -kInf) || !(f_plus < kInf)) {
    throw std::runtime_error("dhz_estimate: no nonempty block covers x0");
  }

  DhzEstimate est;
  est.f_minus = f_minus;
  est.f_plus = f_plus;
  est.f_hat = 0.5 * (f_minus + f_plus);
  est.u_hat.resize(d);
  est.v_hat.resize(d);
  CellIndex lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  bool valid = true;
  for (int k = 0; k < d; ++k) {
    auto ku = static_cast<std::size_t>(k);
    est.u_hat[k] = arg_l[ku] < lat.n_at_most[ku] ? lat.coords[ku][static_cast<std::size_t>(arg_l[ku])]
                                                 : x0[k];
    est.v_hat[k] = arg_u[ku] >= lat.n_at_most[ku] ? lat.coords[ku][static_cast<std::size_t>(arg_u[ku])]
                                                  : x0[k];
    if (arg_l[ku] > arg_u[ku] || arg_u[ku] < 0) valid = false;
    lo[ku] = arg_l[ku];
    hi[ku] = std::max(arg_u[ku], arg_l[ku]);
  }
  long cnt = valid ? std::lround(lat.counts.block_sum(lo, hi)) : 0;
  if (cnt < 1) {
    // The f_minus argmax and f_plus argmin corners need not bracket any point;
    // fall back to the full observed block so the count stays positive.
    CellIndex all_lo(static_cast<std::size_t>(d), 0), all_hi(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) all_hi[static_cast<std::size_t>(k)] = lat.grid.cells()[static_cast<std::size_t>(k)] - 1;
    cnt = std::lround(lat.counts.block_sum(all_lo, all_hi));
  }
  est.block_count = cnt;
  return est;
}

DhzInterval dhz_interval(const DhzEstimate& est, double sigma_hat, double c_gamma) {
  if (!(c_gamma >= 0.0)) throw std::invalid_argument("dhz_interval: c_gamma must be nonnegative");
  double half = c_gamma * sigma_hat / std::sqrt(static_cast<double>(est.block_count));
  return DhzInterval{est.f_hat - half, est.f_hat + half};
}

}  // namespace monoreg
