#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "monoreg/dhz.hpp"
#include "monoreg/grid.hpp"
#include "monoreg/rng.hpp"

using namespace monoreg;

namespace {

// Literal 1-d max-min over every pair of observed-or-x0 corner candidates.
void brute_1d(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double x0,
              double& f_minus, double& f_plus) {
  std::vector<double> cand(xs.data(), xs.data() + xs.size());
  cand.push_back(x0);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto mean_in = [&](double a, double b, double& out) {
    double s = 0;
    long c = 0;
    for (long i = 0; i < xs.size(); ++i) {
      if (xs[i] >= a && xs[i] <= b) {
        s += ys[i];
        ++c;
      }
    }
    if (c == 0) return false;
    out = s / static_cast<double>(c);
    return true;
  };
  f_minus = -inf;
  f_plus = inf;
  for (double u : cand) {
    if (u > x0) continue;
    double inner = inf;
    for (double v : cand) {
      if (v < x0) continue;
      double m;
      if (mean_in(u, v, m)) inner = std::min(inner, m);
    }
    if (inner < inf) f_minus = std::max(f_minus, inner);
  }
  for (double v : cand) {
    if (v < x0) continue;
    double inner = -inf;
    for (double u : cand) {
      if (u > x0) continue;
      double m;
      if (mean_in(u, v, m)) inner = std::max(inner, m);
    }
    if (inner > -inf) f_plus = std::min(f_plus, inner);
  }
}

}  // namespace

TEST_CASE("single point returns its own response") {
  Eigen::MatrixXd x(1, 1);
  x << 0.3;
  Eigen::VectorXd y(1);
  y << 4.2;
  RegressionDataset data(x, y);
  Eigen::VectorXd x0(1);
  x0 << 0.5;
  auto est = dhz_estimate(data, x0);
  CHECK(est.f_minus == doctest::Approx(4.2));
  CHECK(est.f_plus == doctest::Approx(4.2));
  CHECK(est.block_count == 1);
}

TEST_CASE("hand example: antitonic pair around x0 averages out") {
  Eigen::MatrixXd x(2, 1);
  x << 0.2, 0.8;
  Eigen::VectorXd y(2);
  y << 2.0, 1.0;
  RegressionDataset data(x, y);
  Eigen::VectorXd x0(1);
  x0 << 0.5;
  auto est = dhz_estimate(data, x0);
  CHECK(est.f_minus == doctest::Approx(1.5));
  CHECK(est.f_plus == doctest::Approx(1.5));
  CHECK(est.f_hat == doctest::Approx(1.5));
  CHECK(est.block_count == 2);
}

TEST_CASE("monotone data with x0 on a sample point") {
  Eigen::MatrixXd x(3, 1);
  x << 0.2, 0.5, 0.8;
  Eigen::VectorXd y(3);
  y << 1.0, 2.0, 3.0;
  RegressionDataset data(x, y);
  Eigen::VectorXd x0(1);
  x0 << 0.5;
  auto est = dhz_estimate(data, x0);
  // max-min: best lower corner is 0.5 itself -> min over v of mean[0.5, v] = 2
  CHECK(est.f_minus == doctest::Approx(2.0));
  CHECK(est.f_plus == doctest::Approx(2.0));
}

TEST_CASE("1-d estimates match an exhaustive corner search") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 200; ++rep) {
    const long n = 15;
    Eigen::MatrixXd x(n, 1);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
      x(i, 0) = std::round(ux(rng) * 20.0) / 20.0;  // ties on purpose
      y[i] = x(i, 0) + nd(rng);
    }
    RegressionDataset data(x, y);
    Eigen::VectorXd x0(1);
    x0 << std::round(ux(rng) * 10.0) / 10.0;
    double fm, fp;
    brute_1d(x.col(0), y, x0[0], fm, fp);
    auto est = dhz_estimate(data, x0);
    CHECK(est.f_minus == doctest::Approx(fm).epsilon(1e-10));
    CHECK(est.f_plus == doctest::Approx(fp).epsilon(1e-10));
    CHECK(est.block_count >= 1);
  }
}

TEST_CASE("2-d estimate brackets the local mean on clean monotone data") {
  // y = x1 + x2 exactly; the max-min and min-max estimates around the center
  // must both land between the corner values of the smallest covering block.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  const long n = 80;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    x(i, 0) = ux(rng);
    x(i, 1) = ux(rng);
    y[i] = x(i, 0) + x(i, 1);
  }
  RegressionDataset data(x, y);
  Eigen::VectorXd x0(2);
  x0 << 0.5, 0.5;
  auto est = dhz_estimate(data, x0);
  CHECK(est.f_hat == doctest::Approx(1.0).epsilon(0.35));
  CHECK(est.block_count >= 1);
  CHECK(est.block_count <= n);
}

TEST_CASE("larger lattice-valued sample stays fast and sane") {
  std::mt19937_64 rng = substream(404);
  std::uniform_int_distribution<int> lat(0, 39);
  std::normal_distribution<double> nd;
  const long n = 2000;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    x(i, 0) = lat(rng) / 39.0;
    x(i, 1) = lat(rng) / 39.0;
    y[i] = std::sqrt(x(i, 0) + x(i, 1)) + nd(rng);
  }
  RegressionDataset data(x, y);
  Eigen::VectorXd x0(2);
  x0 << 0.5, 0.5;
  auto est = dhz_estimate(data, x0);
  CHECK(std::isfinite(est.f_minus));
  CHECK(std::isfinite(est.f_plus));
  CHECK(est.f_hat == doctest::Approx(1.0).epsilon(0.5));
  auto iv = dhz_interval(est, 1.0, 2.0);
  CHECK(iv.lower < est.f_hat);
  CHECK(iv.upper > est.f_hat);
  CHECK(iv.upper - iv.lower ==
        doctest::Approx(2.0 * 2.0 / std::sqrt(static_cast<double>(est.block_count))));
}

TEST_CASE("interval arithmetic and argument checks") {
  DhzEstimate est;
  est.f_minus = 1.0;
  est.f_plus = 2.0;
  est.f_hat = 1.5;
  est.block_count = 4;
  auto iv = dhz_interval(est, 2.0, 1.5);
  CHECK(iv.lower == doctest::Approx(1.5 - 1.5));
  CHECK(iv.upper == doctest::Approx(1.5 + 1.5));
  CHECK_THROWS(dhz_interval(est, 1.0, -0.5));
}
