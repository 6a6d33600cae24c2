#ifndef SURPRISE_SWEEP_HPP_
#define SURPRISE_SWEEP_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "surprise/config.hpp"
#include "surprise/trainer.hpp"

namespace surprise {

// Type-7 quantile (linear interpolation of order statistics).
double quantile_type7(std::vector<double> xs, double p);

struct SweepResult {
  std::string label;
  std::vector<std::uint64_t> seeds;
  std::vector<std::filesystem::path> csv_paths;  // completed seeds only
  std::vector<std::string> failures;             // "seed N: message"
  // Per-iteration order statistics of ret_ext_mean over completed seeds.
  std::vector<double> median;
  std::vector<double> lower_quartile;
  std::vector<double> upper_quartile;
};

// Runs train() once per seed (parallel workers) and aggregates quartile
// curves. Individual seed failures are recorded; aggregation proceeds as long
// as at least half of the seeds completed, otherwise throws.
SweepResult run_sweep(const RunConfig& cfg,
                      const std::vector<std::uint64_t>& seeds,
                      const std::filesystem::path& out_dir,
                      std::size_t max_workers);

// Re-aggregate from per-seed CSV files (the plot path).
SweepResult aggregate_from_csvs(const std::vector<std::filesystem::path>& csvs,
                                const std::string& label);

struct CompareRow {
  std::string scheme;
  double final_median_return = 0.0;
  // Median over seeds of the first iteration with positive extrinsic return;
  // NaN when half or more of the seeds never saw a reward.
  double median_iters_to_first_reward = 0.0;
  double mean_wall_ms = 0.0;
  double mean_bonus_ms = 0.0;
  double mean_model_update_ms = 0.0;
};

std::vector<CompareRow> compare_schemes(
    const RunConfig& base, const std::vector<std::string>& schemes,
    const std::vector<std::uint64_t>& seeds, std::size_t iterations,
    const std::filesystem::path& out_dir, std::size_t max_workers);

std::string format_compare_table(const std::vector<CompareRow>& rows);

// Worker cap: SURPRISE_RL_THREADS when set, otherwise hardware concurrency.
std::size_t max_workers_from_env();

}  // namespace surprise

#endif  // SURPRISE_SWEEP_HPP_
