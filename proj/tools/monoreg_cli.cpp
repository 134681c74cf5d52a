// Command-line front end: fit, interval, simulate-zb, coverage, compare-dhz.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "monoreg/dhz.hpp"
#include "monoreg/errors.hpp"
#include "monoreg/harness.hpp"
#include "monoreg/immersion.hpp"
#include "monoreg/intervals.hpp"
#include "monoreg/limitsim.hpp"

namespace {

using nlohmann::ordered_json;

monoreg::ImmersionKind parse_kind(const std::string& s) {
  if (s == "lower") return monoreg::ImmersionKind::lower;
  if (s == "upper") return monoreg::ImmersionKind::upper;
  if (s == "average") return monoreg::ImmersionKind::average;
  throw monoreg::ConfigError("unknown immersion kind: " + s);
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
  return out;
}

void write_json(const ordered_json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw monoreg::DataError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

struct FitArgs {
  std::string data_path;
  std::string kind = "average";
  int cells = 0;  // 0 = default rule
  std::string out;
  std::uint64_t seed = 1;
};

void run_fit(const FitArgs& args) {
  auto data = monoreg::load_csv(args.data_path);
  monoreg::GridSpec grid =
      args.cells > 0
          ? monoreg::GridSpec(std::vector<int>(static_cast<std::size_t>(data.dim()), args.cells))
          : monoreg::GridSpec::default_for(data.n(), data.dim());
  auto prior = monoreg::PriorSpec::broadcast(grid, 0.0, 1000.0);
  monoreg::BinStats stats(data, grid);
  auto params = monoreg::make_posterior(stats, prior, data);
  auto surface = monoreg::isotonize_surface(params.mean, stats, parse_kind(args.kind));

  ordered_json j;
  j["d"] = grid.dim();
  j["cells_per_axis"] = grid.cells();
  j["kind"] = args.kind;
  j["sigma2"] = params.sigma2_rule.constant;
  j["theta"] = std::vector<double>(surface.theta.data(), surface.theta.data() + surface.theta.size());
  write_json(j, args.out);
}

struct IntervalArgs {
  std::string data_path;
  std::string x0 = "";
  double level = 0.05;
  std::string kind = "average";
  long draws = 2000;
  int cells = 0;
  std::string table;
  std::string beta = "";
  std::string out;
  std::uint64_t seed = 1;
  int workers = 1;
};

void run_interval(const IntervalArgs& args) {
  auto data = monoreg::load_csv(args.data_path);
  Eigen::VectorXd x0;
  if (args.x0.empty()) {
    x0 = Eigen::VectorXd::Constant(data.dim(), 0.5);
  } else {
    auto v = parse_doubles(args.x0);
    if (static_cast<int>(v.size()) != data.dim()) {
      throw monoreg::ConfigError("--x0 dimension does not match the data");
    }
    x0 = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
  }
  monoreg::GridSpec grid =
      args.cells > 0
          ? monoreg::GridSpec(std::vector<int>(static_cast<std::size_t>(data.dim()), args.cells))
          : monoreg::GridSpec::default_for(data.n(), data.dim());
  auto prior = monoreg::PriorSpec::broadcast(grid, 0.0, 1000.0);
  auto kind = parse_kind(args.kind);
  auto draws = monoreg::immersion_draws_at(data, grid, prior, x0, kind, args.draws,
                                           args.seed, args.workers);
  double credibility = 1.0 - args.level;
  ordered_json j;
  j["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());
  j["kind"] = args.kind;
  j["level"] = args.level;
  auto ci = monoreg::credible_interval(draws, credibility, monoreg::Sided::two_sided_equal_tail);
  j["interval"] = {{"lower", ci.lower}, {"upper", ci.upper}, {"credibility", credibility}};
  if (!args.table.empty()) {
    std::vector<int> beta;
    if (args.beta.empty()) {
      beta.assign(static_cast<std::size_t>(data.dim()), 1);
    } else {
      for (double b : parse_doubles(args.beta)) beta.push_back(static_cast<int>(b));
    }
    int table_kind = kind == monoreg::ImmersionKind::lower   ? 1
                     : kind == monoreg::ImmersionKind::upper ? 2
                                                             : 3;
    auto table = monoreg::ZbTable::load_csv(args.table, table_kind, beta);
    double adj = monoreg::recalibrate_level(credibility, table,
                                            monoreg::Sided::two_sided_equal_tail);
    auto ci_adj = monoreg::credible_interval(draws, adj, monoreg::Sided::two_sided_equal_tail);
    j["recalibrated"] = {{"lower", ci_adj.lower},
                         {"upper", ci_adj.upper},
                         {"credibility", adj}};
  }
  write_json(j, args.out);
}

struct SimulateArgs {
  int d = 1;
  std::string beta = "1";
  std::string kind = "all";
  int m = 0;
  double horizon = 0.0;
  long outer = 0;
  long inner = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;
};

void run_simulate(const SimulateArgs& args) {
  monoreg::ZbSimConfig cfg = monoreg::ZbSimConfig::desk_defaults(args.d);
  cfg.beta.clear();
  for (double b : parse_doubles(args.beta)) cfg.beta.push_back(static_cast<int>(b));
  if (args.m > 0) cfg.m = args.m;
  if (args.horizon > 0) cfg.horizon = args.horizon;
  if (args.outer > 0) cfg.outer = args.outer;
  if (args.inner > 0) cfg.inner = args.inner;
  cfg.seed = args.seed;
  cfg.workers = args.workers;
  std::vector<int> kinds;
  if (args.kind == "all") {
    kinds = {1, 2, 3};
  } else {
    kinds = {std::stoi(args.kind)};
  }
  auto tables = monoreg::zb_distribution(cfg, kinds);
  if (args.out.empty()) throw monoreg::ConfigError("simulate-zb requires --out");
  monoreg::ZbTable::write_csv(args.out, tables);
}

struct StudyArgs {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  int workers = 0;
  bool has_seed = false;
};

void run_coverage(const StudyArgs& args) {
  auto cfg = monoreg::parse_study_config(args.config_path);
  if (args.has_seed) cfg.seed = args.seed;
  if (args.workers > 0) cfg.workers = args.workers;
  auto rows = monoreg::coverage_study(cfg);
  if (args.out.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"function", r.function}, {"n", r.n}, {"level", r.level},
                     {"method", r.method}, {"coverage_pct", r.coverage_pct},
                     {"mean_length", r.mean_length}, {"sd_length", r.sd_length}});
    }
    std::cout << arr.dump(2) << '\n';
  } else {
    monoreg::emit_json(rows, args.out);
  }
}

struct DhzArgs {
  std::string config_path;
  std::string c_gamma;
  std::string out;
  std::uint64_t seed = 0;
  int workers = 0;
  bool has_seed = false;
};

void run_compare_dhz(const DhzArgs& args) {
  auto cfg = monoreg::parse_study_config(args.config_path);
  if (args.has_seed) cfg.seed = args.seed;
  if (args.workers > 0) cfg.workers = args.workers;
  if (!args.c_gamma.empty()) {
    cfg.c_gamma.clear();
    std::stringstream ss(args.c_gamma);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      auto eq = pair.find('=');
      if (eq == std::string::npos) {
        throw monoreg::ConfigError("--c-gamma needs level=value pairs");
      }
      cfg.c_gamma[std::stod(pair.substr(0, eq))] = std::stod(pair.substr(eq + 1));
    }
  }
  if (cfg.c_gamma.empty()) {
    throw monoreg::ConfigError(
        "compare-dhz refuses to run without explicit c_gamma critical values");
  }
  auto rows = monoreg::dhz_study(cfg);
  if (args.out.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"function", r.function}, {"n", r.n}, {"level", r.level},
                     {"method", r.method}, {"coverage_pct", r.coverage_pct},
                     {"mean_length", r.mean_length}, {"sd_length", r.sd_length}});
    }
    std::cout << arr.dump(2) << '\n';
  } else {
    monoreg::emit_json(rows, args.out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate monotone regression: immersion-posterior intervals"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Isotonized posterior-mean surface from a CSV dataset");
  fit_cmd->add_option("--data", fit.data_path, "input CSV (x1,...,xd,y)")->required();
  fit_cmd->add_option("--kind", fit.kind, "immersion map: lower|upper|average");
  fit_cmd->add_option("--J", fit.cells, "cells per axis (default: grid rule)");
  fit_cmd->add_option("--out", fit.out, "output JSON path (default: stdout)");
  fit_cmd->add_option("--seed", fit.seed, "RNG seed");

  IntervalArgs iv;
  auto* iv_cmd = app.add_subcommand("interval", "Pointwise credible interval at x0");
  iv_cmd->add_option("--data", iv.data_path, "input CSV")->required();
  iv_cmd->add_option("--x0", iv.x0, "comma-separated point (default: 0.5,...)");
  iv_cmd->add_option("--level", iv.level, "gamma; credibility = 1 - level");
  iv_cmd->add_option("--kind", iv.kind, "lower|upper|average");
  iv_cmd->add_option("--draws", iv.draws, "posterior draws");
  iv_cmd->add_option("--J", iv.cells, "cells per axis");
  iv_cmd->add_option("--table", iv.table, "Z_B table CSV for recalibration");
  iv_cmd->add_option("--beta", iv.beta, "smoothness vector for table lookup");
  iv_cmd->add_option("--out", iv.out, "output JSON path");
  iv_cmd->add_option("--seed", iv.seed, "RNG seed");
  iv_cmd->add_option("--workers", iv.workers, "worker threads");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate-zb", "Monte Carlo tables for Z_B");
  sim_cmd->add_option("--d", sim.d, "dimension (1 or 2)");
  sim_cmd->add_option("--beta", sim.beta, "comma-separated smoothness vector");
  sim_cmd->add_option("--kind", sim.kind, "1|2|3|all");
  sim_cmd->add_option("--m", sim.m, "grid resolution per unit");
  sim_cmd->add_option("--horizon", sim.horizon, "domain horizon per axis");
  sim_cmd->add_option("--outer", sim.outer, "outer H1 replications");
  sim_cmd->add_option("--inner", sim.inner, "inner H2 replications");
  sim_cmd->add_option("--seed", sim.seed, "RNG seed");
  sim_cmd->add_option("--workers", sim.workers, "worker threads");
  sim_cmd->add_option("--out", sim.out, "output CSV path")->required();

  StudyArgs study;
  auto* cov_cmd = app.add_subcommand("coverage", "Replicated coverage study");
  cov_cmd->add_option("--config", study.config_path, "study config file")->required();
  cov_cmd->add_option("--out", study.out, "output JSON path");
  auto* seed_opt = cov_cmd->add_option("--seed", study.seed, "override config seed");
  cov_cmd->add_option("--workers", study.workers, "override config workers");

  DhzArgs dhz;
  auto* dhz_cmd = app.add_subcommand("compare-dhz", "Frequentist DHZ baseline study");
  dhz_cmd->add_option("--config", dhz.config_path, "study config file")->required();
  dhz_cmd->add_option("--c-gamma", dhz.c_gamma, "level=value critical values");
  dhz_cmd->add_option("--out", dhz.out, "output JSON path");
  auto* dhz_seed_opt = dhz_cmd->add_option("--seed", dhz.seed, "override config seed");
  dhz_cmd->add_option("--workers", dhz.workers, "override config workers");

  try {
    app.parse(argc, argv);
    study.has_seed = seed_opt->count() > 0;
    dhz.has_seed = dhz_seed_opt->count() > 0;
    if (fit_cmd->parsed()) run_fit(fit);
    if (iv_cmd->parsed()) run_interval(iv);
    if (sim_cmd->parsed()) run_simulate(sim);
    if (cov_cmd->parsed()) run_coverage(study);
    if (dhz_cmd->parsed()) run_compare_dhz(dhz);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const monoreg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const monoreg::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
