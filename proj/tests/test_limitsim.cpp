#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "monoreg/limitsim.hpp"
#include "monoreg/rng.hpp"

using namespace monoreg;

TEST_CASE("1-d process has Brownian moments") {
  const int m = 40;
  const double horizon = 2.0;
  const int reps = 20000;
  auto rng = substream(123);
  double s_u = 0, s_u2 = 0, s_uv = 0;
  int iu = m;          // u = 1.0
  int iu_half = m / 2; // u = 0.5
  for (int r = 0; r < reps; ++r) {
    auto h = simulate_H_1d(m, horizon, rng);
    double a = field_value(h, iu, 0);
    double b = field_value(h, iu_half, 0);
    s_u += a;
    s_u2 += a * a;
    s_uv += a * b;
  }
  double mean = s_u / reps;
  double var = s_u2 / reps - mean * mean;
  double cov = s_uv / reps - mean * (mean / 2);
  CHECK(std::abs(mean) < 0.03);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));       // Var H(u,0) = u
  CHECK(cov == doctest::Approx(0.5).epsilon(0.08));       // Cov = min(u, u')
}

TEST_CASE("u and v branches are independent with additive variance") {
  const int m = 25;
  auto rng = substream(55);
  const int reps = 20000;
  double s = 0, s2 = 0;
  for (int r = 0; r < reps; ++r) {
    auto h = simulate_H_1d(m, 3.0, rng);
    double x = field_value(h, m, 2 * m);  // H(1, 2): variance 1 + 2
    s += x;
    s2 += x * x;
  }
  double var = s2 / reps - (s / reps) * (s / reps);
  CHECK(var == doctest::Approx(3.0).epsilon(0.06));
}

TEST_CASE("2-d process variance scales with the covered area") {
  const int m = 8;
  auto rng = substream(77);
  const int reps = 20000;
  double s = 0, s2 = 0;
  for (int r = 0; r < reps; ++r) {
    auto h = simulate_H_2d(m, 2.0, rng);
    // H at u = (1,1), no v part: variance = area = 1
    double x = field_value(h, m, m, 0, 0);
    s += x;
    s2 += x * x;
  }
  double var = s2 / reps - (s / reps) * (s / reps);
  CHECK(var == doctest::Approx(1.0).epsilon(0.06));
}

TEST_CASE("drift-only field is antisymmetric and its sup-inf vanishes") {
  // With both H fields zero the drift (v^2 - u^2)/(u + v) = v - u remains;
  // sup_u inf_v (v - u) over a common grid is exactly 0 at u = v minimal.
  DriftSpec drift{{1}};
  const int m = 10;
  const double horizon = 2.0;
  ProcessField1D z1, z2;
  z1.m = z2.m = m;
  z1.steps = z2.steps = static_cast<int>(std::lround(horizon * m));
  z1.cum_u = Eigen::ArrayXd::Zero(z1.steps);
  z1.cum_v = Eigen::ArrayXd::Zero(z1.steps);
  z2.cum_u = z1.cum_u;
  z2.cum_v = z1.cum_v;
  auto f = u_field(z1, z2, drift);
  for (int i = 0; i < f.rows(); ++i)
    for (int j = 0; j < f.cols(); ++j) {
      double u = (i + 1) / static_cast<double>(m);
      double v = (j + 1) / static_cast<double>(m);
      CHECK(f(i, j) == doctest::Approx(v - u).epsilon(1e-12));
    }
  CHECK(std::abs(supinf(f)) < 1e-12);
  CHECK(std::abs(infsup(f)) < 1e-12);
}

TEST_CASE("sup-inf never exceeds inf-sup") {
  DriftSpec drift{{1}};
  auto rng = substream(5);
  for (int r = 0; r < 50; ++r) {
    auto h1 = simulate_H_1d(20, 3.0, rng);
    auto h2 = simulate_H_1d(20, 3.0, rng);
    auto f = u_field(h1, h2, drift);
    CHECK(supinf(f) <= infsup(f) + 1e-12);
  }
  DriftSpec drift2{{1, 1}};
  for (int r = 0; r < 20; ++r) {
    auto h1 = simulate_H_2d(4, 3.0, rng);
    auto h2 = simulate_H_2d(4, 3.0, rng);
    auto f = u_field(h1, h2, drift2);
    CHECK(supinf(f) <= infsup(f) + 1e-12);
  }
}

TEST_CASE("nested extrema on a hand-built matrix") {
  Eigen::ArrayXXd f(2, 3);
  f << 1, 5, 3,
       4, 2, 6;
  // rows = u: inf over v per row = (1, 2); sup of those = 2
  CHECK(supinf(f) == doctest::Approx(2.0));
  // sup over u per column = (4, 5, 6); inf of those = 4
  CHECK(infsup(f) == doctest::Approx(4.0));
}

TEST_CASE("samples are deterministic for any worker count") {
  ZbSimConfig cfg = ZbSimConfig::desk_defaults(1);
  cfg.outer = 40;
  cfg.inner = 20;
  cfg.m = 10;
  cfg.horizon = 3.0;
  cfg.seed = 314;
  cfg.workers = 1;
  auto a = zb_distribution_samples(cfg);
  cfg.workers = 3;
  auto b = zb_distribution_samples(cfg);
  CHECK((a.k1 - b.k1).abs().maxCoeff() == 0.0);
  CHECK((a.k2 - b.k2).abs().maxCoeff() == 0.0);
  CHECK((a.k3 - b.k3).abs().maxCoeff() == 0.0);
  for (int i = 0; i < a.k1.size(); ++i) {
    CHECK(a.k1[i] >= 0.0);
    CHECK(a.k1[i] <= 1.0);
    // the average functional sits between the two nested extrema, so the
    // kind-3 exceedance fraction is bracketed by the kind-1 and kind-2 ones
    CHECK(a.k2[i] <= a.k3[i] + 1e-12);
    CHECK(a.k3[i] <= a.k1[i] + 1e-12);
  }
}

TEST_CASE("distribution tables come back for the requested kinds") {
  ZbSimConfig cfg = ZbSimConfig::desk_defaults(1);
  cfg.outer = 30;
  cfg.inner = 10;
  cfg.m = 8;
  cfg.horizon = 2.0;
  cfg.seed = 2;
  auto tables = zb_distribution(cfg, {1, 3});
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].kind == 1);
  CHECK(tables[1].kind == 3);
  CHECK(tables[0].d == 1);
  CHECK(tables[0].beta == std::vector<int>{1});
}

TEST_CASE("config validation rejects nonsense") {
  ZbSimConfig cfg = ZbSimConfig::desk_defaults(1);
  cfg.m = 0;
  CHECK_THROWS(cfg.validate());
  cfg = ZbSimConfig::desk_defaults(2);
  CHECK(cfg.d == 2);
  CHECK(cfg.beta == std::vector<int>{1, 1});
  cfg.beta = {1};
  CHECK_THROWS(cfg.validate());
}
