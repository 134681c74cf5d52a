#include "monoreg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "monoreg/dhz.hpp"
#include "monoreg/errors.hpp"
#include "monoreg/parallel.hpp"
#include "monoreg/rng.hpp"

namespace monoreg {

void StudyConfig::validate() const {
  static const char* kFunctions[] = {"f1", "f2", "f3", "f4", "f5"};
  bool known = std::any_of(std::begin(kFunctions), std::end(kFunctions),
                           [&](const char* f) { return function == f; });
  if (!known) throw ConfigError("unknown function id: " + function);
  if (n < 1) throw ConfigError("n must be positive");
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be nonnegative");
  if (d < 1) throw ConfigError("d must be positive");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0,1)");
  if (replications < 1 || draws < 2) throw ConfigError("counts must be positive");
  if (cells_per_axis && *cells_per_axis < 1) throw ConfigError("J must be positive");
  if (sigma_cells_per_axis && *sigma_cells_per_axis < 1) {
    throw ConfigError("J_sigma must be positive");
  }
  if (recalibrate && table_path.empty()) {
    throw ConfigError("recalibration requested but no Z_B table configured");
  }
  Eigen::VectorXd x = x0_or_default();
  for (long k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0 && x[k] < 1.0)) throw ConfigError("x0 must lie strictly inside (0,1)^d");
  }
}

Eigen::VectorXd StudyConfig::x0_or_default() const {
  if (x0.size() > 0) return x0;
  return Eigen::VectorXd::Constant(d, 0.5);
}

std::vector<int> StudyConfig::beta_or_default() const {
  if (!beta.empty()) return beta;
  return std::vector<int>(static_cast<std::size_t>(d), 1);
}

GridSpec StudyConfig::make_grid() const {
  if (cells_per_axis) return GridSpec(std::vector<int>(static_cast<std::size_t>(d), *cells_per_axis));
  return GridSpec::default_for(n, d);
}

GridSpec StudyConfig::make_sigma_grid() const {
  int j = sigma_cells_per_axis
              ? *sigma_cells_per_axis
              : std::max(1, static_cast<int>(std::floor(
                                std::pow(static_cast<double>(n) / 3.0, 1.0 / d))));
  return GridSpec(std::vector<int>(static_cast<std::size_t>(d), j));
}

namespace {

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

StudyConfig parse_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  StudyConfig cfg;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "function") {
        cfg.function = value;
      } else if (key == "n") {
        cfg.n = std::stol(value);
      } else if (key == "sigma") {
        cfg.sigma = std::stod(value);
      } else if (key == "d") {
        cfg.d = std::stoi(value);
      } else if (key == "x0") {
        auto v = parse_double_list(value);
        cfg.x0 = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
      } else if (key == "J") {
        if (value != "auto") cfg.cells_per_axis = std::stoi(value);
      } else if (key == "J_sigma") {
        if (value != "auto") cfg.sigma_cells_per_axis = std::stoi(value);
      } else if (key == "zeta") {
        cfg.zeta = std::stod(value);
      } else if (key == "lambda2") {
        cfg.lambda2 = std::stod(value);
      } else if (key == "variance_mode") {
        if (value == "mmle") {
          cfg.variance_mode = MmlePlugin{};
        } else if (value.rfind("fixed:", 0) == 0) {
          cfg.variance_mode = FixedSigma{std::stod(value.substr(6))};
        } else if (value.rfind("inverse_gamma:", 0) == 0) {
          auto rest = value.substr(14);
          auto colon = rest.find(':');
          if (colon == std::string::npos) throw ConfigError("inverse_gamma needs b1:b2");
          cfg.variance_mode =
              InverseGamma{std::stod(rest.substr(0, colon)), std::stod(rest.substr(colon + 1))};
        } else {
          throw ConfigError("unknown variance_mode: " + value);
        }
      } else if (key == "kind") {
        if (value == "lower") cfg.kind = ImmersionKind::lower;
        else if (value == "upper") cfg.kind = ImmersionKind::upper;
        else if (value == "average") cfg.kind = ImmersionKind::average;
        else throw ConfigError("unknown kind: " + value);
      } else if (key == "level") {
        cfg.level = std::stod(value);
      } else if (key == "recalibrate") {
        cfg.recalibrate = value == "true" || value == "on" || value == "1";
      } else if (key == "table") {
        cfg.table_path = value;
      } else if (key == "beta") {
        cfg.beta.clear();
        for (double b : parse_double_list(value)) cfg.beta.push_back(static_cast<int>(b));
      } else if (key == "replications") {
        cfg.replications = std::stol(value);
      } else if (key == "draws") {
        cfg.draws = std::stol(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "workers") {
        cfg.workers = std::stoi(value);
      } else if (key == "c_gamma") {
        // level=value pairs, comma separated: 0.05=2.1,0.10=1.7
        std::stringstream ss(value);
        std::string pair;
        while (std::getline(ss, pair, ',')) {
          auto peq = pair.find('=');
          if (peq == std::string::npos) throw ConfigError("c_gamma needs level=value pairs");
          cfg.c_gamma[std::stod(trim(pair.substr(0, peq)))] = std::stod(trim(pair.substr(peq + 1)));
        }
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

double true_function(const std::string& id, const Eigen::VectorXd& x) {
  if (x.size() < 2) throw ConfigError("simulation functions require d >= 2");
  double x1 = x[0], x2 = x[1];
  if (id == "f1") return (x1 + x2) * (x1 + x2);
  if (id == "f2") return std::sqrt(x1 + x2);
  if (id == "f3") return x1 * x2;
  if (id == "f4") return std::exp(x1 + x2);
  if (id == "f5") return std::exp(x1 * x2);
  throw ConfigError("unknown function id: " + id);
}

RegressionDataset generate_dataset(const StudyConfig& config, std::uint64_t seed) {
  auto rng = substream(seed, 0x9e3779b9);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(config.n, config.d);
  Eigen::VectorXd y(config.n);
  for (long i = 0; i < config.n; ++i) {
    for (int k = 0; k < config.d; ++k) x(i, k) = unif(rng);
    y[i] = true_function(config.function, x.row(i).transpose()) + config.sigma * normal(rng);
  }
  return RegressionDataset(std::move(x), std::move(y));
}

namespace {

struct RepOutcome {
  bool hit = false;
  double length = 0.0;
  bool hit_adj = false;
  double length_adj = 0.0;
};

// Resolves the variance mode for one replication: under the marginal-MLE
// plug-in, sigma^2 is estimated on the (coarser) variance grid and injected
// as a fixed value; the other modes pass through untouched.
VarianceMode resolve_variance(const StudyConfig& cfg, const RegressionDataset& data) {
  if (!std::holds_alternative<MmlePlugin>(cfg.variance_mode)) return cfg.variance_mode;
  GridSpec sigma_grid = cfg.make_sigma_grid();
  PriorSpec sigma_prior = PriorSpec::broadcast(sigma_grid, cfg.zeta, cfg.lambda2, MmlePlugin{});
  return FixedSigma{sigma2_mmle(BinStats(data, sigma_grid), sigma_prior, data)};
}

StudyRow summarize(const StudyConfig& cfg, const std::string& method,
                   const std::vector<double>& lengths, long hits) {
  const double reps = static_cast<double>(lengths.size());
  double mean = 0.0;
  for (double l : lengths) mean += l;
  mean /= reps;
  double var = 0.0;
  for (double l : lengths) var += (l - mean) * (l - mean);
  double sd = lengths.size() > 1 ? std::sqrt(var / (reps - 1.0)) : 0.0;
  return StudyRow{cfg.function, cfg.n,    cfg.level, method,
                  100.0 * static_cast<double>(hits) / reps, mean, sd};
}

}  // namespace

std::vector<StudyRow> coverage_study(const StudyConfig& config) {
  config.validate();
  const Eigen::VectorXd x0 = config.x0_or_default();
  const double truth = true_function(config.function, x0);
  const double credibility = 1.0 - config.level;

  double credibility_adj = credibility;
  if (config.recalibrate) {
    int table_kind = config.kind == ImmersionKind::lower   ? 1
                     : config.kind == ImmersionKind::upper ? 2
                                                           : 3;
    ZbTable table = ZbTable::load_csv(config.table_path, table_kind, config.beta_or_default());
    credibility_adj = recalibrate_level(credibility, table, Sided::two_sided_equal_tail);
  }

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.replications));
  parallel_for(config.replications, config.workers, [&](long rep) {
    std::uint64_t rep_seed = splitmix64(config.seed ^ (static_cast<std::uint64_t>(rep) * 0x9e3779b97f4a7c15ULL));
    RegressionDataset data = generate_dataset(config, rep_seed);
    GridSpec grid = config.make_grid();
    PriorSpec prior =
        PriorSpec::broadcast(grid, config.zeta, config.lambda2, resolve_variance(config, data));
    ImmersionDraws draws = immersion_draws_at(data, grid, prior, x0, config.kind,
                                              config.draws, rep_seed, 1);
    RepOutcome& out = outcomes[static_cast<std::size_t>(rep)];
    CredibleInterval ci = credible_interval(draws, credibility, Sided::two_sided_equal_tail);
    out.hit = ci.lower <= truth && truth <= ci.upper;
    out.length = ci.upper - ci.lower;
    if (config.recalibrate) {
      CredibleInterval adj = credible_interval(draws, credibility_adj, Sided::two_sided_equal_tail);
      out.hit_adj = adj.lower <= truth && truth <= adj.upper;
      out.length_adj = adj.upper - adj.lower;
    }
  });

  std::vector<double> lengths, lengths_adj;
  long hits = 0, hits_adj = 0;
  for (const auto& o : outcomes) {
    lengths.push_back(o.length);
    hits += o.hit ? 1 : 0;
    if (config.recalibrate) {
      lengths_adj.push_back(o.length_adj);
      hits_adj += o.hit_adj ? 1 : 0;
    }
  }
  std::vector<StudyRow> rows;
  rows.push_back(summarize(config, "IB", lengths, hits));
  if (config.recalibrate) rows.push_back(summarize(config, "IB_adj", lengths_adj, hits_adj));
  return rows;
}

std::vector<StudyRow> dhz_study(const StudyConfig& config) {
  config.validate();
  if (config.c_gamma.find(config.level) == config.c_gamma.end()) {
    throw ConfigError("no c_gamma configured for level " + std::to_string(config.level));
  }
  const double c_gamma = config.c_gamma.at(config.level);
  const Eigen::VectorXd x0 = config.x0_or_default();
  const double truth = true_function(config.function, x0);

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.replications));
  parallel_for(config.replications, config.workers, [&](long rep) {
    std::uint64_t rep_seed = splitmix64(config.seed ^ (static_cast<std::uint64_t>(rep) * 0x9e3779b97f4a7c15ULL));
    RegressionDataset data = generate_dataset(config, rep_seed);
    GridSpec sigma_grid = config.make_sigma_grid();
    PriorSpec sigma_prior =
        PriorSpec::broadcast(sigma_grid, config.zeta, config.lambda2, MmlePlugin{});
    double sigma_hat = std::sqrt(sigma2_mmle(BinStats(data, sigma_grid), sigma_prior, data));
    DhzEstimate est = dhz_estimate(data, x0);
    DhzInterval ci = dhz_interval(est, sigma_hat, c_gamma);
    RepOutcome& out = outcomes[static_cast<std::size_t>(rep)];
    out.hit = ci.lower <= truth && truth <= ci.upper;
    out.length = ci.upper - ci.lower;
  });
  std::vector<double> lengths;
  long hits = 0;
  for (const auto& o : outcomes) {
    lengths.push_back(o.length);
    hits += o.hit ? 1 : 0;
  }
  return {summarize(config, "DHZ", lengths, hits)};
}

RegressionDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  if (header.size() < 2 || header.back() != "y") {
    throw DataError(path + ": header must be x1,...,xd,y");
  }
  const int d = static_cast<int>(header.size()) - 1;
  for (int k = 0; k < d; ++k) {
    std::string expected = "x" + std::to_string(k + 1);
    if (header[static_cast<std::size_t>(k)] != expected) {
      throw DataError(path + ": unexpected column '" + header[static_cast<std::size_t>(k)] +
                      "', expected '" + expected + "'");
    }
  }
  std::vector<std::vector<double>> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> row;
    while (std::getline(ss, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw DataError(path + ": line " + std::to_string(lineno) + ": bad number '" + field + "'");
      }
    }
    if (static_cast<int>(row.size()) != d + 1) {
      throw DataError(path + ": line " + std::to_string(lineno) + ": expected " +
                      std::to_string(d + 1) + " fields");
    }
    for (int k = 0; k < d; ++k) {
      if (!(row[static_cast<std::size_t>(k)] >= 0.0 && row[static_cast<std::size_t>(k)] <= 1.0)) {
        throw DataError(path + ": line " + std::to_string(lineno) + ": coordinate outside [0,1]");
      }
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd x(static_cast<long>(rows.size()), d);
  Eigen::VectorXd y(static_cast<long>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < d; ++k) x(static_cast<long>(i), k) = rows[i][static_cast<std::size_t>(k)];
    y[static_cast<long>(i)] = rows[i][static_cast<std::size_t>(d)];
  }
  return RegressionDataset(std::move(x), std::move(y));
}

void write_csv(const RegressionDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out.precision(17);
  for (int k = 0; k < data.dim(); ++k) out << 'x' << (k + 1) << ',';
  out << "y\n";
  for (long i = 0; i < data.n(); ++i) {
    for (int k = 0; k < data.dim(); ++k) out << data.x()(i, k) << ',';
    out << data.y()[i] << '\n';
  }
}

void emit_json(const std::vector<StudyRow>& rows, const std::string& path) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"function", r.function},
                   {"n", r.n},
                   {"level", r.level},
                   {"method", r.method},
                   {"coverage_pct", r.coverage_pct},
                   {"mean_length", r.mean_length},
                   {"sd_length", r.sd_length}});
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << arr.dump(2) << '\n';
}

}  // namespace monoreg
