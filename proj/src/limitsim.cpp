#include "monoreg/limitsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "monoreg/parallel.hpp"
#include "monoreg/rng.hpp"

namespace monoreg {

void DriftSpec::validate() const {
  if (beta.empty()) throw std::invalid_argument("DriftSpec: beta must be nonempty");
  for (int b : beta) {
    if (b < 1) throw std::invalid_argument("DriftSpec: beta entries must be positive integers");
  }
}

namespace {

int step_count(int m, double horizon) {
  if (m < 1) throw std::invalid_argument("limitsim: m must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("limitsim: horizon must be positive");
  return static_cast<int>(std::ceil(static_cast<double>(m) * horizon));
}

// Chord slope of t^{beta+1} over [-u, v]: (v^{b+1} - (-u)^{b+1}) / (u + v).
double drift_term(double u, double v, int beta) {
  double vp = std::pow(v, beta + 1);
  double up = std::pow(-u, beta + 1);
  return (vp - up) / (u + v);
}

}  // namespace

ProcessField1D simulate_H_1d(int m, double horizon, std::mt19937_64& rng) {
  ProcessField1D h;
  h.m = m;
  h.steps = step_count(m, horizon);
  h.cum_u.resize(h.steps);
  h.cum_v.resize(h.steps);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  double acc = 0.0;
  for (int i = 0; i < h.steps; ++i) {
    acc += normal(rng) * scale;
    h.cum_u[i] = acc;
  }
  acc = 0.0;
  for (int i = 0; i < h.steps; ++i) {
    acc += normal(rng) * scale;
    h.cum_v[i] = acc;
  }
  return h;
}

ProcessField2D simulate_H_2d(int m, double horizon, std::mt19937_64& rng) {
  ProcessField2D h;
  h.m = m;
  h.steps = step_count(m, horizon);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto prefix = [&](Eigen::ArrayXXd& q) {
    q.resize(h.steps, h.steps);
    for (int i = 0; i < h.steps; ++i) {
      for (int j = 0; j < h.steps; ++j) q(i, j) = normal(rng);
    }
    for (int i = 0; i < h.steps; ++i) {
      for (int j = 1; j < h.steps; ++j) q(i, j) += q(i, j - 1);
    }
    for (int i = 1; i < h.steps; ++i) q.row(i) += q.row(i - 1);
    q /= static_cast<double>(m);
  };
  // Fixed corner order (v1,v2), (u1,v2), (u1,u2), (v1,u2) so draws are reproducible.
  prefix(h.q_vv);
  prefix(h.q_uv);
  prefix(h.q_uu);
  prefix(h.q_vu);
  return h;
}

double field_value(const ProcessField1D& h, int iu, int iv) {
  double s = 0.0;
  if (iu > 0) s += h.cum_u[iu - 1];
  if (iv > 0) s += h.cum_v[iv - 1];
  return s;
}

double field_value(const ProcessField2D& h, int iu1, int iu2, int iv1, int iv2) {
  double s = 0.0;
  if (iv1 > 0 && iv2 > 0) s += h.q_vv(iv1 - 1, iv2 - 1);
  if (iu1 > 0 && iv2 > 0) s += h.q_uv(iu1 - 1, iv2 - 1);
  if (iu1 > 0 && iu2 > 0) s += h.q_uu(iu1 - 1, iu2 - 1);
  if (iv1 > 0 && iu2 > 0) s += h.q_vu(iv1 - 1, iu2 - 1);
  return s;
}

UWorkspace::UWorkspace(const DriftSpec& drift, int m, double horizon)
    : beta_(drift.beta), m_(m), steps_(step_count(m, horizon)) {
  drift.validate();
  const int d = dim();
  if (d != 1 && d != 2) throw std::invalid_argument("UWorkspace: only d = 1, 2 supported");
  Eigen::ArrayXd axis(steps_);
  for (int i = 0; i < steps_; ++i) axis[i] = static_cast<double>(i + 1) / m_;

  if (d == 1) {
    recip_.resize(steps_, steps_);
    drift_.resize(steps_, steps_);
    for (int j = 0; j < steps_; ++j) {
      for (int i = 0; i < steps_; ++i) {
        recip_(i, j) = 1.0 / (axis[i] + axis[j]);
        drift_(i, j) = drift_term(axis[i], axis[j], beta_[0]);
      }
    }
    return;
  }
  const long n = static_cast<long>(steps_) * steps_;
  recip_.resize(n, n);
  drift_.resize(n, n);
  for (int v1 = 0; v1 < steps_; ++v1) {
    for (int v2 = 0; v2 < steps_; ++v2) {
      long vf = static_cast<long>(v1) * steps_ + v2;
      for (int u1 = 0; u1 < steps_; ++u1) {
        for (int u2 = 0; u2 < steps_; ++u2) {
          long uf = static_cast<long>(u1) * steps_ + u2;
          double s1 = axis[u1] + axis[v1];
          double s2 = axis[u2] + axis[v2];
          recip_(uf, vf) = 1.0 / (s1 * s2);
          drift_(uf, vf) = drift_term(axis[u1], axis[v1], beta_[0]) +
                           drift_term(axis[u2], axis[v2], beta_[1]);
        }
      }
    }
  }
}

void UWorkspace::field(const ProcessField1D& h1, const ProcessField1D& h2,
                       Eigen::ArrayXXd& out) const {
  if (dim() != 1) throw std::invalid_argument("UWorkspace::field: dimension mismatch");
  if (h1.steps < steps_ || h2.steps < steps_) {
    throw std::invalid_argument("UWorkspace::field: process horizon too short");
  }
  out.resize(steps_, steps_);
  Eigen::ArrayXd a = h1.cum_u.head(steps_) + h2.cum_u.head(steps_);
  Eigen::ArrayXd b = h1.cum_v.head(steps_) + h2.cum_v.head(steps_);
  for (int j = 0; j < steps_; ++j) {
    out.col(j) = (a + b[j]) * recip_.col(j) + drift_.col(j);
  }
}

void UWorkspace::field(const ProcessField2D& h1, const ProcessField2D& h2,
                       Eigen::ArrayXXd& out) const {
  if (dim() != 2) throw std::invalid_argument("UWorkspace::field: dimension mismatch");
  if (h1.steps < steps_ || h2.steps < steps_) {
    throw std::invalid_argument("UWorkspace::field: process horizon too short");
  }
  const int s = steps_;
  const long n = static_cast<long>(s) * s;
  out.resize(n, n);
  Eigen::ArrayXXd uu = h1.q_uu + h2.q_uu;
  Eigen::ArrayXXd vv = h1.q_vv + h2.q_vv;
  Eigen::ArrayXXd uv = h1.q_uv + h2.q_uv;
  Eigen::ArrayXXd vu = h1.q_vu + h2.q_vu;
  for (int v1 = 0; v1 < s; ++v1) {
    for (int v2 = 0; v2 < s; ++v2) {
      long vf = static_cast<long>(v1) * s + v2;
      auto col = out.col(vf);
      const double base = vv(v1, v2);
      for (int u1 = 0; u1 < s; ++u1) {
        col.segment(static_cast<long>(u1) * s, s) =
            uu.row(u1).transpose() + vu.row(v1).transpose() + (uv(u1, v2) + base);
      }
      col = col * recip_.col(vf) + drift_.col(vf);
    }
  }
}

double supinf(const Eigen::ArrayXXd& field) {
  if (field.size() == 0) throw std::invalid_argument("supinf: empty field");
  return field.rowwise().minCoeff().maxCoeff();
}

double infsup(const Eigen::ArrayXXd& field) {
  if (field.size() == 0) throw std::invalid_argument("infsup: empty field");
  return field.colwise().maxCoeff().minCoeff();
}

Eigen::ArrayXXd u_field(const ProcessField1D& h1, const ProcessField1D& h2,
                        const DriftSpec& drift) {
  UWorkspace ws(drift, h1.m, static_cast<double>(std::min(h1.steps, h2.steps)) / h1.m);
  Eigen::ArrayXXd out;
  ws.field(h1, h2, out);
  return out;
}

Eigen::ArrayXXd u_field(const ProcessField2D& h1, const ProcessField2D& h2,
                        const DriftSpec& drift) {
  UWorkspace ws(drift, h1.m, static_cast<double>(std::min(h1.steps, h2.steps)) / h1.m);
  Eigen::ArrayXXd out;
  ws.field(h1, h2, out);
  return out;
}

namespace {

double functional(int kind, const Eigen::ArrayXXd& field) {
  switch (kind) {
    case 1:
      return supinf(field);
    case 2:
      return infsup(field);
    case 3:
      return 0.5 * (supinf(field) + infsup(field));
  }
  throw std::invalid_argument("zb: kind must be 1, 2, or 3");
}

template <typename Field, typename Simulate>
double zb_sample_impl(const Field& h1, long n_inner, const UWorkspace& ws, int kind,
                      Simulate&& simulate_h2) {
  if (n_inner < 1) throw std::invalid_argument("zb_sample: n_inner must be >= 1");
  Eigen::ArrayXXd buf;
  long nonpos = 0;
  for (long i = 0; i < n_inner; ++i) {
    Field h2 = simulate_h2(i);
    ws.field(h1, h2, buf);
    if (functional(kind, buf) <= 0.0) ++nonpos;
  }
  return static_cast<double>(nonpos) / static_cast<double>(n_inner);
}

}  // namespace

double zb_sample(const ProcessField1D& h1, long n_inner, const DriftSpec& drift,
                 int kind, int m, double horizon, std::mt19937_64& rng) {
  UWorkspace ws(drift, m, horizon);
  return zb_sample_impl(h1, n_inner, ws, kind,
                        [&](long) { return simulate_H_1d(m, horizon, rng); });
}

double zb_sample(const ProcessField2D& h1, long n_inner, const DriftSpec& drift,
                 int kind, int m, double horizon, std::mt19937_64& rng) {
  UWorkspace ws(drift, m, horizon);
  return zb_sample_impl(h1, n_inner, ws, kind,
                        [&](long) { return simulate_H_2d(m, horizon, rng); });
}

void ZbSimConfig::validate() const {
  DriftSpec{beta}.validate();
  if (d != static_cast<int>(beta.size())) {
    throw std::invalid_argument("ZbSimConfig: beta length must equal d");
  }
  if (d != 1 && d != 2) throw std::invalid_argument("ZbSimConfig: only d = 1, 2 supported");
  if (outer < 1 || inner < 1) throw std::invalid_argument("ZbSimConfig: counts must be >= 1");
  step_count(m, horizon);
}

ZbSimConfig ZbSimConfig::published_defaults(int d) {
  ZbSimConfig c;
  c.d = d;
  c.beta.assign(static_cast<std::size_t>(d), 1);
  if (d == 1) {
    c.m = 50;
    c.horizon = 7.0;
  } else {
    c.m = 5;
    c.horizon = 5.0;
  }
  c.outer = 50000;
  c.inner = 500;
  return c;
}

ZbSimConfig ZbSimConfig::desk_defaults(int d) {
  ZbSimConfig c = published_defaults(d);
  if (d == 1) {
    c.outer = 2000;
    c.inner = 200;
  } else {
    c.outer = 500;
    c.inner = 100;
  }
  return c;
}

ZbSamples zb_distribution_samples(const ZbSimConfig& config) {
  config.validate();
  DriftSpec drift{config.beta};
  UWorkspace ws(drift, config.m, config.horizon);
  ZbSamples out;
  out.k1.resize(config.outer);
  out.k2.resize(config.outer);
  out.k3.resize(config.outer);

  auto run_outer = [&](auto simulate, long o) {
    auto rng1 = substream(config.seed, static_cast<std::uint64_t>(o), 0);
    auto h1 = simulate(config.m, config.horizon, rng1);
    Eigen::ArrayXXd buf;
    long n1 = 0, n2 = 0, n3 = 0;
    for (long i = 0; i < config.inner; ++i) {
      auto rng2 = substream(config.seed, static_cast<std::uint64_t>(o),
                            static_cast<std::uint64_t>(i) + 1);
      auto h2 = simulate(config.m, config.horizon, rng2);
      ws.field(h1, h2, buf);
      double z1 = supinf(buf);
      double z2 = infsup(buf);
      if (z1 <= 0.0) ++n1;
      if (z2 <= 0.0) ++n2;
      if (0.5 * (z1 + z2) <= 0.0) ++n3;
    }
    const double denom = static_cast<double>(config.inner);
    out.k1[o] = static_cast<double>(n1) / denom;
    out.k2[o] = static_cast<double>(n2) / denom;
    out.k3[o] = static_cast<double>(n3) / denom;
  };

  if (config.d == 1) {
    parallel_for(config.outer, config.workers,
                 [&](long o) { run_outer([](int m, double h, std::mt19937_64& r) { return simulate_H_1d(m, h, r); }, o); });
  } else {
    parallel_for(config.outer, config.workers,
                 [&](long o) { run_outer([](int m, double h, std::mt19937_64& r) { return simulate_H_2d(m, h, r); }, o); });
  }
  return out;
}

std::vector<ZbTable> zb_distribution(const ZbSimConfig& config,
                                     const std::vector<int>& kinds) {
  ZbSamples samples = zb_distribution_samples(config);
  std::vector<ZbTable> tables;
  for (int kind : kinds) {
    const Eigen::ArrayXd& s = kind == 1 ? samples.k1 : kind == 2 ? samples.k2 : samples.k3;
    if (kind < 1 || kind > 3) throw std::invalid_argument("zb_distribution: kind must be 1-3");
    tables.push_back(ZbTable::from_samples(s, kind, config.d, config.beta));
  }
  return tables;
}

}  // namespace monoreg
