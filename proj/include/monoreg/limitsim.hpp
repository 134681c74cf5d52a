#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <vector>

#include "monoreg/intervals.hpp"

namespace monoreg {

/// Per-axis order of the first nonzero directional derivative; indexes the
/// drift term of the limiting process.
struct DriftSpec {
  std::vector<int> beta;

  int dim() const { return static_cast<int>(beta.size()); }
  void validate() const;
};

/// Discretized centered Gaussian process on [0,horizon]^2 with kernel
/// u ^ u' + v ^ v', realized through cumulative sums of iid normals.
/// Grid value at (i/m, j/m) reads the cumulative arrays at i, j.
struct ProcessField1D {
  int m = 1;
  int steps = 0;
  Eigen::ArrayXd cum_u;  // cum_u[i-1] ~ H(i/m, 0)
  Eigen::ArrayXd cum_v;
};

/// d = 2 analogue built from four independent Gaussian matrices whose 2-d
/// prefix sums realize the four quadrant contributions.
struct ProcessField2D {
  int m = 1;
  int steps = 0;
  Eigen::ArrayXXd q_uu;  // (u1,u2) quadrant, prefix-summed, scaled by 1/m
  Eigen::ArrayXXd q_vv;
  Eigen::ArrayXXd q_uv;  // (u1,v2)
  Eigen::ArrayXXd q_vu;  // (v1,u2)
};

ProcessField1D simulate_H_1d(int m, double horizon, std::mt19937_64& rng);
ProcessField2D simulate_H_2d(int m, double horizon, std::mt19937_64& rng);

/// Evaluation helpers on the discretization grid (1-based step indices;
/// index 0 means the corresponding coordinate is absent and contributes 0).
double field_value(const ProcessField1D& h, int iu, int iv);
double field_value(const ProcessField2D& h, int iu1, int iu2, int iv1, int iv2);

/// Precomputed reciprocal and drift matrices on the (1/m .. horizon) grid;
/// the origin is excluded (indices start at 1/m) so the ratio is well defined.
/// Field matrices are indexed rows = flattened u, cols = flattened v.
class UWorkspace {
 public:
  UWorkspace(const DriftSpec& drift, int m, double horizon);

  int dim() const { return static_cast<int>(beta_.size()); }
  int steps() const { return steps_; }
  long nflat() const { return drift_.rows(); }
  const Eigen::ArrayXXd& drift() const { return drift_; }

  /// Fills out with U-tilde for the pair (h1, h2).
  void field(const ProcessField1D& h1, const ProcessField1D& h2, Eigen::ArrayXXd& out) const;
  void field(const ProcessField2D& h1, const ProcessField2D& h2, Eigen::ArrayXXd& out) const;

 private:
  std::vector<int> beta_;
  int m_;
  int steps_;
  Eigen::ArrayXXd recip_;
  Eigen::ArrayXXd drift_;
};

/// Nested extrema over the discrete field (rows = u, cols = v).
double supinf(const Eigen::ArrayXXd& field);
double infsup(const Eigen::ArrayXXd& field);

/// Full U-tilde field for one (H1, H2) realization.
Eigen::ArrayXXd u_field(const ProcessField1D& h1, const ProcessField1D& h2,
                        const DriftSpec& drift);
Eigen::ArrayXXd u_field(const ProcessField2D& h1, const ProcessField2D& h2,
                        const DriftSpec& drift);

/// One Z_B sample: the fraction of n_inner independent H2 realizations whose
/// kind-functional of U-tilde is non-positive, conditionally on h1.
double zb_sample(const ProcessField1D& h1, long n_inner, const DriftSpec& drift,
                 int kind, int m, double horizon, std::mt19937_64& rng);
double zb_sample(const ProcessField2D& h1, long n_inner, const DriftSpec& drift,
                 int kind, int m, double horizon, std::mt19937_64& rng);

struct ZbSimConfig {
  int d = 1;
  std::vector<int> beta{1};
  int m = 50;
  double horizon = 7.0;
  long outer = 50000;
  long inner = 500;
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const;
  /// Published-table scale defaults per dimension (d=1: m=50, horizon 7; d=2: m=5, horizon 5).
  static ZbSimConfig published_defaults(int d);
  /// Reduced counts for quick desk runs and the acceptance suite.
  static ZbSimConfig desk_defaults(int d);
};

/// Z_B samples for all three kinds from one simulation pass; kind-3 uses the
/// same (H1, H2) realizations as kinds 1 and 2. Deterministic given seed for
/// any worker count.
struct ZbSamples {
  Eigen::ArrayXd k1;
  Eigen::ArrayXd k2;
  Eigen::ArrayXd k3;
};
ZbSamples zb_distribution_samples(const ZbSimConfig& config);

/// Empirical CDF tables for the requested kinds (1-3).
std::vector<ZbTable> zb_distribution(const ZbSimConfig& config,
                                     const std::vector<int>& kinds = {1, 2, 3});

}  // namespace monoreg
