#include "rdesign/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "rdesign/error.hpp"
#include "rdesign/sampling.hpp"

namespace rdesign {

namespace {

constexpr std::uint64_t kStreamRandomized = 1;
constexpr std::uint64_t kStreamGreedy = 2;
constexpr std::uint64_t kStreamUniform = 3;

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config field '") + key + "': " + e.what());
  }
}

template <class T>
T require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(std::string("config field '") + key + "' is required");
  return get_or<T>(j, key, T{});
}

SymMatrix parse_matrix(const Json& j, const char* key) {
  const auto rows = require<std::vector<std::vector<double>>>(j, key);
  const std::size_t d = rows.size();
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != d) throw UsageError(std::string("matrix '") + key + "' must be square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  if (d == 0) throw UsageError(std::string("matrix '") + key + "' is empty");
  return SymMatrix(d, std::move(flat));
}

Side parse_side(const Json& j) {
  const auto s = get_or<std::string>(j, "side", "min");
  if (s == "min") return Side::Min;
  if (s == "max") return Side::Max;
  throw UsageError("side must be 'min' or 'max'");
}

std::uint64_t stream_of(const std::string& strategy) {
  if (strategy == "randomized_E" || strategy == "randomized_G") return kStreamRandomized;
  if (strategy == "greedy_E" || strategy == "greedy_G") return kStreamGreedy;
  if (strategy == "uniform") return kStreamUniform;
  throw UsageError("unknown strategy '" + strategy + "'");
}

AllocationStrategy bai_strategy(const std::string& name) {
  if (name == "randomized_G") return AllocationStrategy::RandomizedG;
  if (name == "greedy_G") return AllocationStrategy::GreedyG;
  if (name == "uniform") return AllocationStrategy::Uniform;
  throw UsageError("unknown BAI strategy '" + name + "'");
}

DesignWeights design_for(const ExperimentPool& pool, const std::string& which, double tol = 1e-6) {
  if (which == "E") return solve_E_relaxed(pool, tol).weights;
  if (which == "G") return solve_G_relaxed(pool, tol).weights;
  if (which == "uniform") return uniform_design(pool.size());
  throw UsageError("design must be 'E', 'G' or 'uniform'");
}

DesignWeights parse_design(const ExperimentPool& pool, const Json& config) {
  if (config.contains("weights")) return DesignWeights(require<Vector>(config, "weights"));
  return design_for(pool, get_or<std::string>(config, "design", "G"), get_or<double>(config, "tol", 1e-6));
}

Json tail_json(const TailBoundReport& r) {
  Json j{{"bound_value", r.bound_value},
         {"vacuous", r.vacuous()},
         {"conditions_met", r.conditions_met},
         {"condition_detail", r.condition_detail}};
  if (r.alternate_value) j["alternate_value"] = *r.alternate_value;
  if (r.effective_dimension) j["effective_dimension"] = *r.effective_dimension;
  return j;
}

Json guarantee_json(const GuaranteeReport& g) {
  Json j{{"n_min", g.n_min},
         {"multiplier", g.multiplier},
         {"absolute_bound", g.absolute_bound},
         {"leading_term", g.leading_term},
         {"confidence", g.confidence},
         {"conditions_met", g.conditions_met},
         {"condition_detail", g.condition_detail}};
  if (g.effective_dimension) j["effective_dimension"] = *g.effective_dimension;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct Moments {
  double mean = 0.0;
  double std = 0.0;
  double censored_fraction = 0.0;
};

Moments moments(const std::vector<double>& values, const std::vector<bool>& censored) {
  Moments m;
  std::size_t count = 0, cens = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (censored[i]) {
      ++cens;
      continue;
    }
    sum += values[i];
    ++count;
  }
  m.censored_fraction = values.empty() ? 0.0 : static_cast<double>(cens) / static_cast<double>(values.size());
  if (count == 0) {
    m.mean = m.std = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  m.mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!censored[i]) ss += (values[i] - m.mean) * (values[i] - m.mean);
  m.std = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
  return m;
}

}  // namespace

ExperimentPool gaussian_pool(std::size_t K, std::size_t d, std::uint64_t seed) {
  if (d == 0) throw InvalidInput("dimension must be >= 1");
  if (K < d) throw InvalidInput("gaussian pool needs K >= d");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> rows(K, Vector(d));
  for (auto& r : rows)
    for (double& v : r) v = normal(rng);
  return ExperimentPool(d, std::move(rows));
}

std::uint64_t cell_seed(std::uint64_t master, std::uint64_t grid_value, std::uint64_t seed_index) noexcept {
  return split_seed(split_seed(master, grid_value), seed_index);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// ---------------------------------------------------------------------------

ExpEConfig parse_exp_e(const Json& j) {
  ExpEConfig c;
  c.experiment = get_or(j, "experiment", c.experiment);
  c.master_seed = get_or(j, "master_seed", c.master_seed);
  c.seeds = get_or(j, "seeds", c.seeds);
  c.K = get_or(j, "K", c.K);
  c.d_grid = get_or(j, "d_grid", c.d_grid);
  c.n_grid = get_or(j, "n_grid", c.n_grid);
  c.strategies = get_or(j, "strategies", c.strategies);
  c.pool = get_or(j, "pool", c.pool);
  c.tol = get_or(j, "tol", c.tol);
  if (c.seeds == 0 || c.d_grid.empty() || c.n_grid.empty() || c.strategies.empty())
    throw UsageError("exp-e needs seeds >= 1 and non-empty grids and strategies");
  if (c.pool != "gaussian" && c.pool != "canonical") throw UsageError("pool must be 'gaussian' or 'canonical'");
  for (const auto& s : c.strategies)
    if (s != "randomized_E" && s != "greedy_E" && s != "uniform") throw UsageError("unknown exp-e strategy '" + s + "'");
  for (auto d : c.d_grid)
    if (d == 0 || (c.pool == "gaussian" && c.K < d)) throw UsageError("exp-e needs 1 <= d <= K");
  for (auto n : c.n_grid)
    if (n == 0) throw UsageError("n grid values must be >= 1");
  return c;
}

std::vector<ResultRow> run_exp_e(const ExpEConfig& c) {
  std::vector<std::uint64_t> n_grid = c.n_grid;
  std::sort(n_grid.begin(), n_grid.end());
  n_grid.erase(std::unique(n_grid.begin(), n_grid.end()), n_grid.end());
  const std::uint64_t n_max = n_grid.back();
  const std::size_t S = c.strategies.size(), N = n_grid.size();

  struct Cell {
    std::size_t d = 0;
    std::size_t K = 0;
    std::vector<double> value;  // [strategy][n]
    std::vector<bool> censored;
  };
  std::vector<Cell> cells(c.d_grid.size() * c.seeds);
  parallel_for(cells.size(), [&](std::size_t idx) {
    const std::size_t d = c.d_grid[idx / c.seeds];
    const std::size_t s = idx % c.seeds;
    const std::uint64_t seed = cell_seed(c.master_seed, d, s);
    const ExperimentPool pool = c.pool == "canonical" ? ExperimentPool::canonical(d) : gaussian_pool(c.K, d, seed);
    Cell& cell = cells[idx];
    cell.d = d;
    cell.K = pool.size();
    cell.value.assign(S * N, std::numeric_limits<double>::quiet_NaN());
    cell.censored.assign(S * N, true);
    for (std::size_t si = 0; si < S; ++si) {
      const std::string& strategy = c.strategies[si];
      const std::uint64_t stream = split_seed(seed, stream_of(strategy));
      try {
        if (strategy == "greedy_E") {
          Rng rng = make_rng(stream);
          const auto seq = greedy_E_sequence(pool, n_max, rng);
          for (std::size_t ni = 0; ni < N; ++ni) {
            cell.value[si * N + ni] = lambda_min(realized_info(pool, counts_from_sequence(seq, pool.size(), n_grid[ni])));
            cell.censored[si * N + ni] = false;
          }
        } else {
          const DesignWeights mu = strategy == "uniform" ? uniform_design(pool.size()) : solve_E_relaxed(pool, c.tol).weights;
          for (std::size_t ni = 0; ni < N; ++ni) {
            Rng rng = make_rng(split_seed(stream, n_grid[ni]));
            cell.value[si * N + ni] = lambda_min(realized_info(pool, draw_counts(mu, n_grid[ni], rng)));
            cell.censored[si * N + ni] = false;
          }
        }
      } catch (const Error&) {
        // leave the remaining points censored
      }
    }
  });

  std::vector<ResultRow> rows;
  std::vector<ResultRow> summary;
  for (std::size_t di = 0; di < c.d_grid.size(); ++di) {
    for (std::size_t si = 0; si < S; ++si) {
      for (std::size_t ni = 0; ni < N; ++ni) {
        std::vector<double> vals;
        std::vector<bool> cens;
        std::size_t K = 0;
        for (std::size_t s = 0; s < c.seeds; ++s) {
          const Cell& cell = cells[di * c.seeds + s];
          K = cell.K;
          const double v = cell.value[si * N + ni];
          const bool cz = cell.censored[si * N + ni];
          vals.push_back(v);
          cens.push_back(cz);
          rows.push_back({c.experiment, std::to_string(s), c.strategies[si], cell.d, cell.K, n_grid[ni], "lambda_min", v, cz});
        }
        const Moments m = moments(vals, cens);
        const std::size_t d = c.d_grid[di];
        summary.push_back({c.experiment, "all", c.strategies[si], d, K, n_grid[ni], "mean_lambda_min", m.mean, false});
        summary.push_back({c.experiment, "all", c.strategies[si], d, K, n_grid[ni], "std_lambda_min", m.std, false});
        summary.push_back({c.experiment, "all", c.strategies[si], d, K, n_grid[ni], "censored_fraction", m.censored_fraction, false});
      }
    }
  }
  rows.insert(rows.end(), summary.begin(), summary.end());
  return rows;
}

std::string result_rows_csv(const std::vector<ResultRow>& rows) {
  std::string out = "experiment,seed,strategy,d,K,n,metric,value,censored\n";
  for (const auto& r : rows) {
    out += r.experiment + ',' + r.seed + ',' + r.strategy + ',' + std::to_string(r.d) + ',' + std::to_string(r.K) + ',' +
           std::to_string(r.n) + ',' + r.metric + ',' + format_double(r.value) + ',' + (r.censored ? "1" : "0") + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

ExpBaiConfig parse_exp_bai(const Json& j) {
  ExpBaiConfig c;
  c.experiment = get_or(j, "experiment", c.experiment);
  c.master_seed = get_or(j, "master_seed", c.master_seed);
  c.seeds = get_or(j, "seeds", c.seeds);
  c.d_grid = get_or(j, "d_grid", c.d_grid);
  c.strategies = get_or(j, "strategies", c.strategies);
  c.omega = get_or(j, "omega", c.omega);
  c.delta = get_or(j, "delta", c.delta);
  c.noise_std = get_or(j, "noise_std", c.noise_std);
  c.max_rounds = get_or(j, "max_rounds", c.max_rounds);
  if (c.seeds == 0 || c.d_grid.empty() || c.strategies.empty()) throw UsageError("exp-bai needs seeds >= 1 and non-empty grids");
  for (const auto& s : c.strategies) bai_strategy(s);
  for (auto d : c.d_grid)
    if (d < 2) throw UsageError("exp-bai needs d >= 2");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw UsageError("delta must lie in (0,1)");
  if (!(c.noise_std >= 0.0)) throw UsageError("noise_std must be non-negative");
  return c;
}

std::vector<BaiRow> run_exp_bai(const ExpBaiConfig& c) {
  const std::size_t S = c.strategies.size();
  std::vector<BaiRow> rows(c.d_grid.size() * S * c.seeds);
  parallel_for(rows.size(), [&](std::size_t idx) {
    const std::size_t di = idx / (S * c.seeds);
    const std::size_t si = (idx / c.seeds) % S;
    const std::size_t s = idx % c.seeds;
    const std::size_t d = c.d_grid[di];
    BanditInstance inst = soare_instance(d, c.omega);
    inst.noise_std = c.noise_std;
    Rng rng = make_rng(split_seed(cell_seed(c.master_seed, d, s), stream_of(c.strategies[si])));
    const BAIOutcome o = run_bai(inst, bai_strategy(c.strategies[si]), c.delta, c.max_rounds, rng);
    BaiRow& r = rows[idx];
    r.seed = s;
    r.strategy = c.strategies[si];
    r.d = d;
    r.samples_used = o.samples_used;
    r.stopped = o.stopped;
    r.identified_arm = o.identified_arm ? static_cast<long long>(*o.identified_arm) : -1;
    r.correct = o.identified_arm && *o.identified_arm == 0;
  });
  return rows;
}

std::string bai_rows_csv(const std::vector<BaiRow>& rows) {
  std::string out = "seed,strategy,d,samples_used,identified_arm,correct,stopped\n";
  for (const auto& r : rows) {
    out += std::to_string(r.seed) + ',' + r.strategy + ',' + std::to_string(r.d) + ',' + std::to_string(r.samples_used) +
           ',' + std::to_string(r.identified_arm) + ',' + (r.correct ? "1" : "0") + ',' + (r.stopped ? "1" : "0") + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

ValidationResult run_validation(const ExperimentPool& pool, const ValidationConfig& c) {
  static const std::array<const char*, 7> known{"hoeffding_min", "hoeffding_max", "refined_min", "refined_max",
                                                "bennett",       "guarantee_E",   "guarantee_G"};
  if (std::find(known.begin(), known.end(), c.theorem) == known.end())
    throw UsageError("unknown theorem '" + c.theorem + "'");
  const DesignWeights mu = design_for(pool, c.design);
  const SymMatrix M = info_matrix(pool, mu);
  const std::size_t d = pool.dim();
  const double L = pool.L();
  const double lmin = lambda_min(M);
  if (!(lmin > 0.0)) throw Singular(lmin);
  const double dd = static_cast<double>(d);

  ValidationResult out;
  out.theorem = c.theorem;
  if (c.theorem == "guarantee_G")
    out.n_min = static_cast<std::uint64_t>(std::ceil(2.0 * L / lmin * std::log(2.0 * dd / c.delta)));
  else
    out.n_min = static_cast<std::uint64_t>(std::ceil(2.0 * L / lmin * std::log(dd / c.delta)));
  out.n = c.n > 0 ? c.n : static_cast<std::uint64_t>(std::ceil(c.n_factor * static_cast<double>(std::max<std::uint64_t>(out.n_min, 1))));
  const double n = static_cast<double>(out.n);
  const SymMatrix ES = M * n;

  TrialEvent event;
  auto sample = [&pool, &mu, nn = out.n](Rng& rng) { return realized_info(pool, draw_counts(mu, nn, rng)); };
  if (c.theorem == "hoeffding_min" || c.theorem == "refined_min") {
    out.bound = c.theorem == "hoeffding_min" ? hoeffding_bound(Side::Min, c.eps, n, d, L, lmin)
                                             : hoeffding_refined(Side::Min, c.eps, ES, lmin, n, L);
    const double level = (1.0 - c.eps) * lambda_min(ES);
    event = [=](Rng& rng) { return lambda_min(sample(rng)) <= level; };
  } else if (c.theorem == "hoeffding_max" || c.theorem == "refined_max") {
    const double norm = lambda_max(M);
    out.bound = c.theorem == "hoeffding_max" ? hoeffding_bound(Side::Max, c.eps, n, d, L, norm)
                                             : hoeffding_refined(Side::Max, c.eps, ES, norm, n, L);
    const double level = (1.0 + c.eps) * lambda_max(ES);
    event = [=](Rng& rng) { return lambda_max(sample(rng)) >= level; };
  } else if (c.theorem == "bennett") {
    const double sigma2 = spectral_norm(covariance_V(pool, mu));
    const double t = n * bennett_precision(c.delta, n, d, L, sigma2);
    out.bound = bennett_bound(t, n, d, L, sigma2);
    out.bound.condition_detail = "deviation n*t = " + format_double(t) + " from the precision at delta";
    event = [=](Rng& rng) { return spectral_norm(sample(rng) - ES) >= t; };
  } else if (c.theorem == "guarantee_E") {
    const GuaranteeReport g = guarantee_E(n, c.delta, d, L, 1.0 / lmin);
    out.bound.bound_value = c.delta;
    out.bound.condition_detail = "multiplier " + format_double(g.multiplier);
    const double level = n * lmin / g.multiplier;
    event = [=](Rng& rng) { return lambda_min(sample(rng)) < level; };
  } else {
    const GuaranteeReport g = guarantee_G_full(n, c.delta, d, L, M, sigma2_theorem(mu, L));
    out.bound.bound_value = 1.0 - g.confidence;
    out.bound.condition_detail = "multiplier " + format_double(g.multiplier);
    const double mult = g.multiplier;
    event = [=, &pool](Rng& rng) {
      const SymMatrix s = sample(rng);
      try {
        return crit_G(pool, s) * n / dd > mult;
      } catch (const Singular&) {
        return true;
      }
    };
  }
  out.mc = mc_validate(event, out.bound.bound_value, c.trials, c.master_seed);
  return out;
}

ExperimentPool parse_pool(const Json& desc) {
  if (!desc.is_object()) throw UsageError("pool must be an object");
  const auto type = get_or<std::string>(desc, "type", "explicit");
  if (type == "canonical") return ExperimentPool::canonical(require<std::size_t>(desc, "d"));
  if (type == "gaussian")
    return gaussian_pool(require<std::size_t>(desc, "K"), require<std::size_t>(desc, "d"), get_or<std::uint64_t>(desc, "seed", 0));
  if (type == "soare") return soare_instance(require<std::size_t>(desc, "d"), get_or<double>(desc, "omega", 0.1)).arms;
  if (type == "explicit") {
    auto rows = require<std::vector<Vector>>(desc, "rows");
    if (rows.empty()) throw UsageError("explicit pool has no rows");
    const std::size_t d = rows.front().size();
    return ExperimentPool(d, std::move(rows));
  }
  throw UsageError("unknown pool type '" + type + "'");
}

std::string cmd_solve(const Json& config) {
  const ExperimentPool pool = parse_pool(require<Json>(config, "pool"));
  const auto criterion = get_or<std::string>(config, "criterion", "G");
  const double tol = get_or<double>(config, "tol", 1e-6);
  DesignSolution sol = [&] {
    if (criterion == "E") return solve_E_relaxed(pool, tol, get_or<std::size_t>(config, "max_iter", 2000));
    if (criterion == "G") return solve_G_relaxed(pool, tol, get_or<std::size_t>(config, "max_iter", 200000));
    throw UsageError("criterion must be 'E' or 'G'");
  }();
  Json out{{"criterion", criterion},
           {"weights", Vector(sol.weights.values().begin(), sol.weights.values().end())},
           {"objective", sol.objective},
           {"certificate_gap", sol.certificate_gap},
           {"iterations", sol.iterations},
           {"converged", sol.converged}};
  return dump(out);
}

std::string cmd_sample(const Json& config) {
  const ExperimentPool pool = parse_pool(require<Json>(config, "pool"));
  const DesignWeights mu = parse_design(pool, config);
  const auto n = require<std::uint64_t>(config, "n");
  const auto trials = get_or<std::size_t>(config, "trials", 1000);
  if (trials == 0) throw UsageError("trials must be >= 1");
  const auto scores = replicate(pool, mu, n, trials, get_or<std::uint64_t>(config, "master_seed", 0));
  std::string out = "trial,ratio_E,ratio_G,censored\n";
  for (std::size_t t = 0; t < scores.size(); ++t)
    out += std::to_string(t) + ',' + format_double(scores[t].ratio_E) + ',' + format_double(scores[t].ratio_G) + ',' +
           (scores[t].censored ? "1" : "0") + '\n';
  return out;
}

std::string cmd_bounds(const Json& c) {
  const auto name = require<std::string>(c, "evaluator");
  Json out{{"evaluator", name}};
  auto num = [&](const char* key) { return require<double>(c, key); };
  auto dim = [&] { return require<std::size_t>(c, "d"); };
  if (name == "hoeffding_bound") {
    // n * anchor / L may be given directly as nAnchorOverL.
    if (c.contains("nAnchorOverL"))
      out["report"] = tail_json(hoeffding_bound(parse_side(c), num("eps"), 1.0, dim(), 1.0, num("nAnchorOverL")));
    else
      out["report"] = tail_json(hoeffding_bound(parse_side(c), num("eps"), num("n"), dim(), num("L"), num("anchor")));
  } else if (name == "hoeffding_simplified") {
    out["report"] = tail_json(hoeffding_simplified(num("eps"), num("n"), dim(), num("L"), num("lam_min")));
  } else if (name == "bennett_bound") {
    out["report"] = tail_json(bennett_bound(num("t"), num("n"), dim(), num("L"), num("sigma2")));
  } else if (name == "bennett_precision") {
    out["precision"] = bennett_precision(num("delta"), num("n"), dim(), num("L"), num("sigma2"));
  } else if (name == "bernstein_tail") {
    const BernsteinTail b = bernstein_tail(num("t"), num("n"), dim(), num("sigma2"), num("c"));
    out["threshold"] = b.threshold;
    out["probability"] = b.probability;
  } else if (name == "hoeffding_intdim") {
    out["report"] = tail_json(hoeffding_intdim(num("eps"), parse_matrix(c, "E_Sn"), num("L")));
  } else if (name == "hoeffding_refined") {
    out["report"] = tail_json(hoeffding_refined(parse_side(c), num("eps"), parse_matrix(c, "E_Sn"), num("anchor"), num("n"), num("L")));
  } else if (name == "bernstein_refined") {
    out["report"] = tail_json(bernstein_refined(num("t"), num("n"), parse_matrix(c, "V"), num("L"), get_or<bool>(c, "as_printed", false)));
  } else if (name == "guarantee_E") {
    out["report"] = guarantee_json(guarantee_E(num("n"), num("delta"), dim(), num("L"), num("norm_Minv")));
  } else if (name == "guarantee_G_full") {
    out["report"] = guarantee_json(guarantee_G_full(num("n"), num("delta"), dim(), num("L"), parse_matrix(c, "M"), num("sigma2")));
  } else if (name == "guarantee_G_refined") {
    out["report"] = guarantee_json(guarantee_G_refined(num("n"), num("delta"), dim(), num("L"), parse_matrix(c, "M"), parse_matrix(c, "V")));
  } else {
    throw UsageError("unknown evaluator '" + name + "'");
  }
  return dump(out);
}

std::string cmd_validate(const Json& config) {
  const ExperimentPool pool = parse_pool(require<Json>(config, "pool"));
  ValidationConfig v;
  v.theorem = get_or(config, "theorem", v.theorem);
  v.design = get_or(config, "design", v.design);
  v.eps = get_or(config, "eps", v.eps);
  v.delta = get_or(config, "delta", v.delta);
  v.n = get_or(config, "n", v.n);
  v.n_factor = get_or(config, "n_factor", v.n_factor);
  v.trials = get_or(config, "trials", v.trials);
  v.master_seed = get_or(config, "master_seed", v.master_seed);
  if (v.trials < 100) throw UsageError("validate needs trials >= 100");
  const ValidationResult r = run_validation(pool, v);
  Json out{{"theorem", r.theorem},
           {"n", r.n},
           {"n_min", r.n_min},
           {"bound", tail_json(r.bound)},
           {"empirical", r.mc.empirical},
           {"slack", r.mc.slack},
           {"trials", r.mc.trials},
           {"dominated", r.mc.dominated}};
  return dump(out);
}

std::string cmd_exp_e(const Json& config) { return result_rows_csv(run_exp_e(parse_exp_e(config))); }

std::string cmd_exp_bai(const Json& config) { return bai_rows_csv(run_exp_bai(parse_exp_bai(config))); }

std::string run_command(const std::string& name, const Json& config) {
  if (name == "solve") return cmd_solve(config);
  if (name == "sample") return cmd_sample(config);
  if (name == "bounds") return cmd_bounds(config);
  if (name == "validate") return cmd_validate(config);
  if (name == "exp-e") return cmd_exp_e(config);
  if (name == "exp-bai") return cmd_exp_bai(config);
  throw UsageError("unknown command '" + name + "'");
}

}  // namespace rdesign
