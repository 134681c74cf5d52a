#include "monoreg/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "monoreg/errors.hpp"

namespace monoreg {

GridSpec::GridSpec(std::vector<int> cells_per_axis) : cells_(std::move(cells_per_axis)) {
  if (cells_.empty()) throw std::invalid_argument("GridSpec: dimension must be >= 1");
  for (int c : cells_) {
    if (c < 1) throw std::invalid_argument("GridSpec: cells per axis must be >= 1");
  }
  strides_.assign(cells_.size(), 1);
  const long limit = std::numeric_limits<long>::max();
  for (int k = dim() - 1; k >= 0; --k) {
    auto ku = static_cast<std::size_t>(k);
    strides_[ku] = total_;
    if (total_ > limit / cells_[ku]) {
      throw std::invalid_argument("GridSpec: total cell count overflows index type");
    }
    total_ *= cells_[ku];
  }
}

long GridSpec::flat(const CellIndex& j) const {
  if (static_cast<int>(j.size()) != dim()) {
    throw std::invalid_argument("GridSpec::flat: index dimension mismatch");
  }
  long f = 0;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (j[k] < 0 || j[k] >= cells_[k]) throw std::out_of_range("GridSpec::flat: index out of range");
    f += j[k] * strides_[k];
  }
  return f;
}

CellIndex GridSpec::unflat(long f) const {
  CellIndex j(cells_.size());
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    j[k] = static_cast<int>((f / strides_[k]) % cells_[k]);
  }
  return j;
}

GridSpec GridSpec::default_for(long n, int d) {
  if (n < 3) throw std::invalid_argument("GridSpec::default_for: n too small");
  double j = std::ceil(std::cbrt(static_cast<double>(n)) * std::log(std::log(static_cast<double>(n))));
  int per_axis = std::max(1, static_cast<int>(j));
  return GridSpec(std::vector<int>(static_cast<std::size_t>(d), per_axis));
}

CellIndex bin_index(const Eigen::VectorXd& x, const GridSpec& grid) {
  if (x.size() != grid.dim()) throw std::invalid_argument("bin_index: dimension mismatch");
  CellIndex j(static_cast<std::size_t>(grid.dim()));
  for (int k = 0; k < grid.dim(); ++k) {
    double xk = x[k];
    if (!(xk >= 0.0 && xk <= 1.0)) throw std::domain_error("bin_index: coordinate outside [0,1]");
    int jk = static_cast<int>(std::ceil(xk * grid.cells()[static_cast<std::size_t>(k)]));
    if (jk < 1) jk = 1;  // x_k = 0 belongs to the first cell
    j[static_cast<std::size_t>(k)] = jk - 1;
  }
  return j;
}

RegressionDataset::RegressionDataset(Eigen::MatrixXd x, Eigen::VectorXd y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.size()) throw DataError("RegressionDataset: x/y length mismatch");
  if (x_.cols() < 1) throw DataError("RegressionDataset: dimension must be >= 1");
  for (long i = 0; i < x_.rows(); ++i) {
    for (long k = 0; k < x_.cols(); ++k) {
      double v = x_(i, k);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataError("RegressionDataset: coordinate outside [0,1] at row " + std::to_string(i));
      }
    }
  }
}

PrefixTable::PrefixTable(const GridSpec& grid, const Eigen::ArrayXd& values)
    : grid_(&grid), data_(values) {
  if (values.size() != grid.total()) throw std::invalid_argument("PrefixTable: size mismatch");
  strides_.assign(static_cast<std::size_t>(grid.dim()), 1);
  long s = 1;
  for (int k = grid.dim() - 1; k >= 0; --k) {
    strides_[static_cast<std::size_t>(k)] = s;
    s *= grid.cells()[static_cast<std::size_t>(k)];
  }
  // Successive cumulative sums along each axis yield the d-dim prefix table.
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const long stride = strides_[static_cast<std::size_t>(axis)];
    grid.for_each_cell([&](const CellIndex& j, long flat) {
      if (j[static_cast<std::size_t>(axis)] > 0) data_[flat] += data_[flat - stride];
    });
  }
}

double PrefixTable::block_sum(const CellIndex& lo, const CellIndex& hi) const {
  const int d = grid_->dim();
  double total = 0.0;
  // Inclusion-exclusion over the 2^d corners.
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    long flat = 0;
    int sign = 1;
    bool skip = false;
    for (int k = 0; k < d; ++k) {
      auto ku = static_cast<std::size_t>(k);
      int idx;
      if (mask & (1u << k)) {
        idx = lo[ku] - 1;
        sign = -sign;
        if (idx < 0) { skip = true; break; }
      } else {
        idx = hi[ku];
      }
      flat += idx * strides_[ku];
    }
    if (!skip) total += sign * data_[flat];
  }
  return total;
}

namespace {
void check_box(const GridSpec& grid, const CellIndex& lo, const CellIndex& hi) {
  if (static_cast<int>(lo.size()) != grid.dim() || static_cast<int>(hi.size()) != grid.dim()) {
    throw std::invalid_argument("block query: index dimension mismatch");
  }
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (lo[k] < 0 || hi[k] >= grid.cells()[k]) throw std::out_of_range("block query: index out of range");
    if (lo[k] > hi[k]) throw std::invalid_argument("block query: lo exceeds hi componentwise");
  }
}
}  // namespace

BinStats::Aggregates BinStats::aggregate(const RegressionDataset& data, const GridSpec& grid) {
  std::vector<long> counts(static_cast<std::size_t>(grid.total()), 0);
  Eigen::ArrayXd sums = Eigen::ArrayXd::Zero(grid.total());
  for (long i = 0; i < data.n(); ++i) {
    long f = grid.flat(bin_index(data.x().row(i).transpose(), grid));
    counts[static_cast<std::size_t>(f)]++;
    sums[f] += data.y()[i];
  }
  return {std::move(counts), std::move(sums)};
}

BinStats::BinStats(GridSpec grid, Aggregates agg, long n)
    : grid_(std::move(grid)),
      n_(n),
      counts_(std::move(agg.first)),
      sums_(std::move(agg.second)),
      prefix_counts_(grid_, [this] {
        Eigen::ArrayXd c(static_cast<long>(counts_.size()));
        for (std::size_t f = 0; f < counts_.size(); ++f) c[static_cast<long>(f)] = static_cast<double>(counts_[f]);
        return c;
      }()),
      prefix_sums_(grid_, sums_) {}

BinStats::BinStats(const RegressionDataset& data, const GridSpec& grid)
    : BinStats(grid, aggregate(data, grid), data.n()) {}

std::optional<double> BinStats::mean(const CellIndex& j) const {
  long f = grid_.flat(j);
  if (counts_[static_cast<std::size_t>(f)] == 0) return std::nullopt;
  return sums_[f] / static_cast<double>(counts_[static_cast<std::size_t>(f)]);
}

long BinStats::block_count(const CellIndex& lo, const CellIndex& hi) const {
  check_box(grid_, lo, hi);
  return std::lround(prefix_counts_.block_sum(lo, hi));
}

double BinStats::block_sum(const CellIndex& lo, const CellIndex& hi) const {
  check_box(grid_, lo, hi);
  return prefix_sums_.block_sum(lo, hi);
}

WeightedBlockMeans::WeightedBlockMeans(const BinStats& stats, const Eigen::ArrayXd& theta)
    : stats_(&stats),
      weighted_(stats.grid(), [&] {
        if (theta.size() != stats.grid().total()) {
          throw std::invalid_argument("WeightedBlockMeans: theta size mismatch");
        }
        Eigen::ArrayXd w(theta.size());
        for (long f = 0; f < theta.size(); ++f) {
          // Empty cells carry zero weight even if theta there is non-finite.
          long c = stats.count(f);
          w[f] = c == 0 ? 0.0 : static_cast<double>(c) * theta[f];
        }
        return w;
      }()) {}

std::optional<double> WeightedBlockMeans::mean(const CellIndex& lo, const CellIndex& hi) const {
  long cnt = stats_->block_count(lo, hi);
  if (cnt == 0) return std::nullopt;
  return weighted_.block_sum(lo, hi) / static_cast<double>(cnt);
}

std::optional<double> block_mean(const BinStats& stats, const CellIndex& j1,
                                 const CellIndex& j2, const Eigen::ArrayXd& theta) {
  check_box(stats.grid(), j1, j2);
  return WeightedBlockMeans(stats, theta).mean(j1, j2);
}

}  // namespace monoreg
