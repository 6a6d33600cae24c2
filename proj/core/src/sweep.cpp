#include "surprise/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "surprise/csv.hpp"

namespace surprise {

double quantile_type7(std::vector<double> xs, double p) {
  require(!xs.empty(), "quantile_type7: empty sample");
  std::sort(xs.begin(), xs.end());
  if (xs.size() == 1) return xs[0];
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return xs[lo] + frac * (xs[hi] - xs[lo]);
}

std::size_t max_workers_from_env() {
  if (const char* env = std::getenv("SURPRISE_RL_THREADS")) {
    const long n = std::atol(env);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

struct SeedOutcome {
  bool ok = false;
  std::string error;
  TrainResult result;
};

void aggregate_curves(const std::vector<std::vector<double>>& curves,
                      SweepResult& out) {
  require(!curves.empty(), "sweep: no completed seeds to aggregate");
  std::size_t iterations = curves[0].size();
  for (const auto& c : curves) iterations = std::min(iterations, c.size());
  out.median.resize(iterations);
  out.lower_quartile.resize(iterations);
  out.upper_quartile.resize(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    std::vector<double> xs;
    xs.reserve(curves.size());
    for (const auto& c : curves) xs.push_back(c[i]);
    out.median[i] = quantile_type7(xs, 0.5);
    out.lower_quartile[i] = quantile_type7(xs, 0.25);
    out.upper_quartile[i] = quantile_type7(xs, 0.75);
  }
}

}  // namespace

SweepResult run_sweep(const RunConfig& cfg,
                      const std::vector<std::uint64_t>& seeds,
                      const std::filesystem::path& out_dir,
                      std::size_t max_workers) {
  require(!seeds.empty(), "run_sweep: need at least one seed");
  std::filesystem::create_directories(out_dir);

  std::vector<SeedOutcome> outcomes(seeds.size());
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::min<std::size_t>(std::max<std::size_t>(max_workers, 1), seeds.size());

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) return;
      RunConfig run_cfg = cfg;
      run_cfg.seed = seeds[i];
      try {
        outcomes[i].result = train(run_cfg, out_dir);
        outcomes[i].ok = true;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult out;
  out.label = to_string(cfg.bonus.scheme);
  out.seeds = seeds;
  std::vector<std::vector<double>> curves;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (outcomes[i].ok) {
      out.csv_paths.push_back(outcomes[i].result.csv_path);
      curves.push_back(outcomes[i].result.ret_ext_mean);
    } else {
      out.failures.push_back("seed " + std::to_string(seeds[i]) + ": " +
                             outcomes[i].error);
    }
  }
  if (curves.size() * 2 < seeds.size()) {
    std::ostringstream os;
    os << "run_sweep: only " << curves.size() << "/" << seeds.size()
       << " seeds completed";
    for (const auto& f : out.failures) os << "\n  " << f;
    throw std::runtime_error(os.str());
  }
  aggregate_curves(curves, out);
  return out;
}

SweepResult aggregate_from_csvs(const std::vector<std::filesystem::path>& csvs,
                                const std::string& label) {
  SweepResult out;
  out.label = label;
  std::vector<std::vector<double>> curves;
  for (const auto& path : csvs) {
    const CsvFile file = parse_csv_file(path);
    curves.push_back(file.column_values("ret_ext_mean"));
    out.csv_paths.push_back(path);
  }
  aggregate_curves(curves, out);
  return out;
}

std::vector<CompareRow> compare_schemes(
    const RunConfig& base, const std::vector<std::string>& schemes,
    const std::vector<std::uint64_t>& seeds, std::size_t iterations,
    const std::filesystem::path& out_dir, std::size_t max_workers) {
  std::vector<CompareRow> rows;
  for (const auto& scheme : schemes) {
    RunConfig cfg = base;
    apply_scheme_override(cfg, scheme);
    cfg.iterations = iterations;
    std::string dir_name = scheme;
    std::replace(dir_name.begin(), dir_name.end(), ':', '_');
    const SweepResult sweep =
        run_sweep(cfg, seeds, out_dir / dir_name, max_workers);

    CompareRow row;
    row.scheme = scheme;
    row.final_median_return =
        sweep.median.empty() ? 0.0 : sweep.median.back();

    std::vector<double> first_reward;
    double wall_acc = 0.0, bonus_acc = 0.0, model_acc = 0.0;
    std::size_t row_count = 0;
    for (const auto& path : sweep.csv_paths) {
      const CsvFile file = parse_csv_file(path);
      const auto ret = file.column_values("ret_ext_mean");
      const auto iter = file.column_values("iteration");
      double fr = std::nan("");
      for (std::size_t i = 0; i < ret.size(); ++i) {
        if (ret[i] > 0.0) {
          fr = iter[i];
          break;
        }
      }
      first_reward.push_back(fr);
      for (double v : file.column_values("wall_ms")) wall_acc += v;
      for (double v : file.column_values("bonus_ms")) bonus_acc += v;
      for (double v : file.column_values("model_update_ms")) model_acc += v;
      row_count += ret.size();
    }
    std::vector<double> reached;
    for (double fr : first_reward) {
      if (!std::isnan(fr)) reached.push_back(fr);
    }
    if (reached.size() * 2 > first_reward.size()) {
      row.median_iters_to_first_reward = quantile_type7(reached, 0.5);
    } else {
      row.median_iters_to_first_reward = std::nan("");
    }
    if (row_count > 0) {
      row.mean_wall_ms = wall_acc / static_cast<double>(row_count);
      row.mean_bonus_ms = bonus_acc / static_cast<double>(row_count);
      row.mean_model_update_ms = model_acc / static_cast<double>(row_count);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_compare_table(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "scheme              final_median_return  iters_to_first_reward  "
        "wall_ms/iter  bonus_ms/iter  model_ms/iter\n";
  for (const auto& r : rows) {
    char buf[256];
    const std::string fr =
        std::isnan(r.median_iters_to_first_reward)
            ? std::string("-")
            : std::to_string(r.median_iters_to_first_reward);
    std::snprintf(buf, sizeof(buf), "%-19s %-20.6g %-22s %-13.3f %-14.3f %.3f\n",
                  r.scheme.c_str(), r.final_median_return, fr.c_str(),
                  r.mean_wall_ms, r.mean_bonus_ms, r.mean_model_update_ms);
    os << buf;
  }
  return os.str();
}

}  // namespace surprise
