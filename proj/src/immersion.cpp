#include "monoreg/immersion.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace monoreg {

bool is_monotone(const GridSpec& grid, const Eigen::ArrayXd& theta) {
  // Checking immediate lattice neighbors along each axis covers the full
  // partial order by transitivity.
  bool ok = true;
  grid.for_each_cell([&](const CellIndex& j, long flat) {
    if (!ok) return;
    for (int k = 0; k < grid.dim(); ++k) {
      auto ku = static_cast<std::size_t>(k);
      if (j[ku] + 1 >= grid.cells()[ku]) continue;
      CellIndex up = j;
      up[ku]++;
      if (theta[flat] > theta[grid.flat(up)]) {
        ok = false;
        return;
      }
    }
  });
  return ok;
}

namespace {

void require_support(const BinStats& stats) {
  if (stats.n() == 0) throw std::runtime_error("immersion map: no observations on the grid");
}

CellIndex origin(int d) { return CellIndex(static_cast<std::size_t>(d), 0); }

CellIndex top(const GridSpec& g) {
  CellIndex j(static_cast<std::size_t>(g.dim()));
  for (int k = 0; k < g.dim(); ++k) j[static_cast<std::size_t>(k)] = g.cells()[static_cast<std::size_t>(k)] - 1;
  return j;
}

}  // namespace

double iota_lower_cell(const WeightedBlockMeans& w, const CellIndex& j0) {
  const BinStats& stats = w.stats();
  require_support(stats);
  const GridSpec& grid = stats.grid();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double outer = -kInf;
  grid.for_each_in_box(origin(grid.dim()), j0, [&](const CellIndex& j1) {
    double inner = kInf;
    grid.for_each_in_box(j0, top(grid), [&](const CellIndex& j2) {
      if (auto m = w.mean(j1, j2)) inner = std::min(inner, *m);
    });
    if (inner < kInf) outer = std::max(outer, inner);
  });
  // The full block [0:J-1] is always feasible when any data exists.
  if (outer == -kInf) throw std::runtime_error("iota_lower: no feasible block");
  return outer;
}

double iota_upper_cell(const WeightedBlockMeans& w, const CellIndex& j0) {
  const BinStats& stats = w.stats();
  require_support(stats);
  const GridSpec& grid = stats.grid();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double outer = kInf;
  grid.for_each_in_box(j0, top(grid), [&](const CellIndex& j2) {
    double inner = -kInf;
    grid.for_each_in_box(origin(grid.dim()), j0, [&](const CellIndex& j1) {
      if (auto m = w.mean(j1, j2)) inner = std::max(inner, *m);
    });
    if (inner > -kInf) outer = std::min(outer, inner);
  });
  if (outer == kInf) throw std::runtime_error("iota_upper: no feasible block");
  return outer;
}

double iota_cell(ImmersionKind kind, const WeightedBlockMeans& w, const CellIndex& j0) {
  switch (kind) {
    case ImmersionKind::lower:
      return iota_lower_cell(w, j0);
    case ImmersionKind::upper:
      return iota_upper_cell(w, j0);
    case ImmersionKind::average:
      return 0.5 * (iota_lower_cell(w, j0) + iota_upper_cell(w, j0));
  }
  throw std::logic_error("iota_cell: unknown kind");
}

double iota_lower_at(const Eigen::ArrayXd& theta, const BinStats& stats,
                     const Eigen::VectorXd& x0) {
  WeightedBlockMeans w(stats, theta);
  return iota_lower_cell(w, bin_index(x0, stats.grid()));
}

double iota_upper_at(const Eigen::ArrayXd& theta, const BinStats& stats,
                     const Eigen::VectorXd& x0) {
  WeightedBlockMeans w(stats, theta);
  return iota_upper_cell(w, bin_index(x0, stats.grid()));
}

double iota_at(ImmersionKind kind, const Eigen::ArrayXd& theta, const BinStats& stats,
               const Eigen::VectorXd& x0) {
  WeightedBlockMeans w(stats, theta);
  return iota_cell(kind, w, bin_index(x0, stats.grid()));
}

StepFunction isotonize_surface(const Eigen::ArrayXd& theta, const BinStats& stats,
                               ImmersionKind kind) {
  require_support(stats);
  WeightedBlockMeans w(stats, theta);
  StepFunction out{stats.grid(), Eigen::ArrayXd(stats.grid().total())};
  stats.grid().for_each_cell([&](const CellIndex& j, long flat) {
    out.theta[flat] = iota_cell(kind, w, j);
  });
  return out;
}

Eigen::ArrayXd pava_1d(const Eigen::ArrayXd& theta, const Eigen::ArrayXd& weights) {
  const long n = theta.size();
  if (weights.size() != n) throw std::invalid_argument("pava_1d: size mismatch");
  for (long i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("pava_1d: weights must be positive");
  }
  // Stack of blocks (mean, weight, length).
  std::vector<double> mean, wsum;
  std::vector<long> len;
  mean.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    double m = theta[i], ws = weights[i];
    long l = 1;
    while (!mean.empty() && mean.back() > m) {
      m = (mean.back() * wsum.back() + m * ws) / (wsum.back() + ws);
      ws += wsum.back();
      l += len.back();
      mean.pop_back();
      wsum.pop_back();
      len.pop_back();
    }
    mean.push_back(m);
    wsum.push_back(ws);
    len.push_back(l);
  }
  Eigen::ArrayXd out(n);
  long pos = 0;
  for (std::size_t b = 0; b < mean.size(); ++b) {
    for (long i = 0; i < len[b]; ++i) out[pos++] = mean[b];
  }
  return out;
}

}  // namespace monoreg
