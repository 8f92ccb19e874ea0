#pragma once

// Experiment campaigns, configuration parsing and CSV/JSON emission behind the CLI.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rdesign/bandit.hpp"
#include "rdesign/bounds.hpp"
#include "rdesign/design.hpp"

namespace rdesign {

using Json = nlohmann::json;

/// Malformed configuration or unknown command/evaluator name (CLI exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// K rows of i.i.d. standard normal coordinates. Throws InvalidInput if K < d.
ExperimentPool gaussian_pool(std::size_t K, std::size_t d, std::uint64_t seed);

/// Seed of cell (seed index, grid value): split_seed(split_seed(master, grid_value), seed_index).
/// Keyed by the grid value rather than its position so grids can grow freely.
std::uint64_t cell_seed(std::uint64_t master, std::uint64_t grid_value, std::uint64_t seed_index) noexcept;

/// Shortest round-trip decimal, independent of locale.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// E-comparison campaign

struct ResultRow {
  std::string experiment;
  std::string seed;  // seed index, or "all" on summary rows
  std::string strategy;
  std::size_t d = 0;
  std::size_t K = 0;
  std::uint64_t n = 0;
  std::string metric;
  double value = 0.0;
  bool censored = false;
};

struct ExpEConfig {
  std::string experiment = "exp_e";
  std::uint64_t master_seed = 0;
  std::size_t seeds = 100;
  std::size_t K = 500;
  std::vector<std::size_t> d_grid{10};
  std::vector<std::uint64_t> n_grid{10, 20, 50, 100, 200, 500, 1000};
  std::vector<std::string> strategies{"randomized_E", "greedy_E", "uniform"};
  std::string pool = "gaussian";  // or "canonical" (then K = d)
  double tol = 1e-6;
};

ExpEConfig parse_exp_e(const Json& config);
/// Per-seed rows (metric "lambda_min") followed by per-point summary rows
/// (mean, std, censored_fraction), sorted deterministically.
std::vector<ResultRow> run_exp_e(const ExpEConfig& config);
std::string result_rows_csv(const std::vector<ResultRow>& rows);

// ---------------------------------------------------------------------------
// Best-arm identification campaign

struct BaiRow {
  std::uint64_t seed = 0;
  std::string strategy;
  std::size_t d = 0;
  std::uint64_t samples_used = 0;
  long long identified_arm = -1;  // -1 when not stopped
  bool correct = false;
  bool stopped = false;
};

struct ExpBaiConfig {
  std::string experiment = "exp_bai";
  std::uint64_t master_seed = 0;
  std::size_t seeds = 100;
  std::vector<std::size_t> d_grid{2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::string> strategies{"randomized_G", "greedy_G"};
  double omega = 0.1;
  double delta = 0.05;
  double noise_std = 1.0;
  std::uint64_t max_rounds = 1000000;
};

ExpBaiConfig parse_exp_bai(const Json& config);
std::vector<BaiRow> run_exp_bai(const ExpBaiConfig& config);
std::string bai_rows_csv(const std::vector<BaiRow>& rows);

// ---------------------------------------------------------------------------
// Monte Carlo validation of a named bound on a design

struct ValidationConfig {
  std::string theorem = "bennett";  // hoeffding_min|hoeffding_max|refined_min|refined_max|bennett|guarantee_E|guarantee_G
  std::string design = "G";         // G|E|uniform
  double eps = 0.5;
  double delta = 0.05;
  /// Absolute n if > 0, otherwise n_factor * n_min.
  std::uint64_t n = 0;
  double n_factor = 4.0;
  std::size_t trials = 10000;
  std::uint64_t master_seed = 0;
};

struct ValidationResult {
  std::string theorem;
  std::uint64_t n = 0;
  std::uint64_t n_min = 0;
  TailBoundReport bound;
  MonteCarloReport mc;
};

/// n_min is the guarantee threshold for the theorem: the randomized-E
/// condition ceil(2 L ||M^{-1}|| log(d/delta)) for the tail bounds and
/// guarantee_E, and the guarantee_G_full condition for guarantee_G.
ValidationResult run_validation(const ExperimentPool& pool, const ValidationConfig& config);

/// Builds a pool from {"type": "canonical"|"gaussian"|"explicit"|"soare", ...}.
ExperimentPool parse_pool(const Json& desc);

// ---------------------------------------------------------------------------
// CLI entry points. Each returns the text to emit (JSON or CSV).

std::string cmd_solve(const Json& config);
std::string cmd_sample(const Json& config);
std::string cmd_bounds(const Json& config);
std::string cmd_validate(const Json& config);
std::string cmd_exp_e(const Json& config);
std::string cmd_exp_bai(const Json& config);

/// Dispatches on the subcommand name; unknown names raise UsageError.
std::string run_command(const std::string& name, const Json& config);

}  // namespace rdesign
