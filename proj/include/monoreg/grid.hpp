#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace monoreg {

/// Multi-index into the cell lattice. Zero-based: cell j covers
/// ((j_k)/J_k, (j_k+1)/J_k] per axis, with the first cell closed at 0.
using CellIndex = std::vector<int>;

/// Hyperrectangular partition of [0,1]^d into prod(J_k) cells.
class GridSpec {
 public:
  explicit GridSpec(std::vector<int> cells_per_axis);

  int dim() const { return static_cast<int>(cells_.size()); }
  const std::vector<int>& cells() const { return cells_; }
  long total() const { return total_; }

  /// Row-major flattening, last axis fastest.
  long flat(const CellIndex& j) const;
  CellIndex unflat(long f) const;

  /// Visits every cell index in flat order.
  template <typename F>
  void for_each_cell(F&& f) const {
    CellIndex j(cells_.size(), 0);
    for (long flat = 0; flat < total_; ++flat) {
      f(j, flat);
      for (int k = dim() - 1; k >= 0; --k) {
        if (++j[static_cast<std::size_t>(k)] < cells_[static_cast<std::size_t>(k)]) break;
        j[static_cast<std::size_t>(k)] = 0;
      }
    }
  }

  /// Visits every cell in the inclusive box [lo, hi].
  template <typename F>
  void for_each_in_box(const CellIndex& lo, const CellIndex& hi, F&& f) const {
    CellIndex j = lo;
    for (;;) {
      f(j);
      int k = dim() - 1;
      for (; k >= 0; --k) {
        auto ku = static_cast<std::size_t>(k);
        if (++j[ku] <= hi[ku]) break;
        j[ku] = lo[ku];
      }
      if (k < 0) return;
    }
  }

  bool operator==(const GridSpec& other) const { return cells_ == other.cells_; }

  /// J = ceil(n^{1/3} log(log n)) per axis, the simulation-study default.
  static GridSpec default_for(long n, int d);

 private:
  std::vector<int> cells_;
  std::vector<long> strides_;
  long total_ = 1;
};

/// Cell containing x: j_k = max(1, ceil(x_k J_k)) - 1, so x_k = 0 falls in
/// the first cell and x_k = 1 in the last. Throws std::domain_error if any
/// coordinate is outside [0,1].
CellIndex bin_index(const Eigen::VectorXd& x, const GridSpec& grid);

/// Raw observations (x in [0,1]^d, y real). Coordinates validated on construction.
class RegressionDataset {
 public:
  RegressionDataset(Eigen::MatrixXd x, Eigen::VectorXd y);

  long n() const { return x_.rows(); }
  int dim() const { return static_cast<int>(x_.cols()); }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }

 private:
  Eigen::MatrixXd x_;  // n x d
  Eigen::VectorXd y_;
};

/// d-dimensional inclusive prefix sums with inclusion-exclusion box queries.
class PrefixTable {
 public:
  PrefixTable(const GridSpec& grid, const Eigen::ArrayXd& values);

  /// Sum of values over the inclusive box [lo, hi].
  double block_sum(const CellIndex& lo, const CellIndex& hi) const;

 private:
  const GridSpec* grid_;
  std::vector<long> strides_;
  Eigen::ArrayXd data_;
};

/// Per-cell counts and response sums on the grid, plus prefix tables for
/// O(1) block aggregates. Immutable after construction.
class BinStats {
 public:
  BinStats(const RegressionDataset& data, const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  long n() const { return n_; }

  long count(long flat) const { return counts_[static_cast<std::size_t>(flat)]; }
  long count(const CellIndex& j) const { return count(grid_.flat(j)); }
  double sum(long flat) const { return sums_[flat]; }
  std::optional<double> mean(const CellIndex& j) const;

  const std::vector<long>& counts() const { return counts_; }
  const Eigen::ArrayXd& sums() const { return sums_; }

  long block_count(const CellIndex& lo, const CellIndex& hi) const;
  double block_sum(const CellIndex& lo, const CellIndex& hi) const;

 private:
  using Aggregates = std::pair<std::vector<long>, Eigen::ArrayXd>;
  BinStats(GridSpec grid, Aggregates agg, long n);
  static Aggregates aggregate(const RegressionDataset& data, const GridSpec& grid);

  GridSpec grid_;
  long n_;
  std::vector<long> counts_;
  Eigen::ArrayXd sums_;
  PrefixTable prefix_counts_;
  PrefixTable prefix_sums_;
};

/// Prefix table over N_j * theta_j, the per-draw structure behind the
/// block max-min maps.
class WeightedBlockMeans {
 public:
  WeightedBlockMeans(const BinStats& stats, const Eigen::ArrayXd& theta);

  /// Count-weighted mean of theta over [lo, hi]; absent when the block is empty.
  std::optional<double> mean(const CellIndex& lo, const CellIndex& hi) const;

  const BinStats& stats() const { return *stats_; }

 private:
  const BinStats* stats_;
  PrefixTable weighted_;
};

/// Count-weighted mean of theta over [j1, j2]. Throws std::invalid_argument
/// unless j1 <= j2 componentwise.
std::optional<double> block_mean(const BinStats& stats, const CellIndex& j1,
                                 const CellIndex& j2, const Eigen::ArrayXd& theta);

}  // namespace monoreg
