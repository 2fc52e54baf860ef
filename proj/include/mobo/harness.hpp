#pragma once

// Run configuration, the optimization loop, and CSV logging.

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mobo/core.hpp"
#include "mobo/problems.hpp"
#include "mobo/subproblem.hpp"

namespace mobo {

enum class Algorithm { kMoboOsd, kRandom, kNbi };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algo);

struct RunConfig {
  std::string problem = "dtlz2-m2";
  Algorithm algo = Algorithm::kMoboOsd;
  int budget = 200;
  int batch = 1;
  int n_beta = 20;
  double delta = kDefaultDelta;
  int n_s = 4;
  int n_e = 10;
  double pfe_scale = 0.05;
  std::vector<std::uint64_t> seeds = {0};
  std::filesystem::path out_dir = "runs";
  std::optional<int> init_count;  // default 2 (D + 1)
  bool use_pfe = true;
  int jobs = 1;
  bool record_wall_time = false;

  /// Throws ContractError on an invalid combination.
  void validate(const Problem& problem) const;
  [[nodiscard]] int resolved_init_count(const Problem& problem) const;
};

/// Shifted-Halton design in the problem box, evaluated.
Dataset initial_design(const Problem& problem, int init_count, std::uint64_t seed);

/// What one optimization iteration produced; handed to the observer.
struct IterationInfo {
  int iteration = 0;
  int pool_size = 0;
  std::vector<int> picked_origins;                   // origin per pick from the pool
  std::vector<std::vector<int>> available_origins;   // at each pick
  int filled = 0;                                    // picks made by the sigma fallback
  std::vector<SubproblemResult> osd;
};

using IterationObserver = std::function<void(const IterationInfo&)>;

struct EvalRow {
  int iteration = 0;
  int eval_index = 0;  // 1-based
  Vector x;
  Vector f;
  double hv_after = 0.0;
  double log_hv_diff_after = 0.0;
  double wall_ms = 0.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EvalRow> rows;
  bool failed = false;
  std::string message;
};

SeedResult run_seed(const RunConfig& config, std::uint64_t seed, const IterationObserver& observer = {});

/// Runs every seed and writes seed_<s>.csv, summary.csv and failures.csv
/// into config.out_dir. Returns the per-seed results.
std::vector<SeedResult> run(const RunConfig& config);

void write_seed_csv(const std::filesystem::path& path, const Problem& problem, const SeedResult& result);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SeedResult>& results);

}  // namespace mobo
