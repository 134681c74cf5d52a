#pragma once

#include <Eigen/Core>

#include "monoreg/grid.hpp"

namespace monoreg {

/// Which block isotonization map to apply to posterior draws.
enum class ImmersionKind { lower, upper, average };

/// Piecewise-constant function on the grid.
struct StepFunction {
  GridSpec grid;
  Eigen::ArrayXd theta;
};

/// Coordinatewise monotonicity of step heights over the cell lattice.
bool is_monotone(const GridSpec& grid, const Eigen::ArrayXd& theta);

/// Max-min map at the cell containing x:
///   max over lower corners j1 <= j0 of the min over upper corners j2 >= j0,
///   restricted to blocks with positive count, of the weighted block mean.
/// Throws std::runtime_error when the data is entirely empty.
double iota_lower_cell(const WeightedBlockMeans& w, const CellIndex& j0);
double iota_upper_cell(const WeightedBlockMeans& w, const CellIndex& j0);
double iota_cell(ImmersionKind kind, const WeightedBlockMeans& w, const CellIndex& j0);

double iota_lower_at(const Eigen::ArrayXd& theta, const BinStats& stats,
                     const Eigen::VectorXd& x0);
double iota_upper_at(const Eigen::ArrayXd& theta, const BinStats& stats,
                     const Eigen::VectorXd& x0);
double iota_at(ImmersionKind kind, const Eigen::ArrayXd& theta, const BinStats& stats,
               const Eigen::VectorXd& x0);

/// Applies the chosen map at every cell (representative point = the cell itself).
StepFunction isotonize_surface(const Eigen::ArrayXd& theta, const BinStats& stats,
                               ImmersionKind kind);

/// Weighted least-squares isotonic fit, univariate pool-adjacent-violators.
/// Test oracle for the d = 1 specialization of the block maps.
Eigen::ArrayXd pava_1d(const Eigen::ArrayXd& theta, const Eigen::ArrayXd& weights);

}  // namespace monoreg
