// Experiment runner: train single runs, sweep seeds, aggregate CSV logs into
// median/interquartile curves, emit SVG plots and scheme comparison tables.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "surprise/config.hpp"
#include "surprise/csv.hpp"
#include "surprise/plot.hpp"
#include "surprise/sweep.hpp"
#include "surprise/trainer.hpp"

namespace fs = std::filesystem;
using namespace surprise;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRunFailure = 3;

RunConfig load_config_or_default(const std::string& config_path) {
  if (config_path.empty()) {
    return parse_config("");
  }
  return parse_config_file(config_path);
}

std::vector<std::uint64_t> parse_seed_range(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t a = std::stoull(spec.substr(0, dots));
    const std::uint64_t b = std::stoull(spec.substr(dots + 2));
    if (b < a) throw ConfigError({"--seeds: range end before start"});
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw ConfigError({"--seeds: empty seed list"});
  return seeds;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<fs::path> seed_csvs_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("seed_", 0) == 0 &&
        entry.path().extension() == ".csv") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_aggregate_csv(const SweepResult& sweep, const fs::path& path) {
  std::ofstream out(path);
  out << "# surprise-rl-aggregate v1\n";
  out << "iteration,median,lower_quartile,upper_quartile\n";
  for (std::size_t i = 0; i < sweep.median.size(); ++i) {
    out << i << "," << format_double(sweep.median[i]) << ","
        << format_double(sweep.lower_quartile[i]) << ","
        << format_double(sweep.upper_quartile[i]) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surprise_rl: surprise-driven exploration experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "runs", scheme_override, seeds_spec = "0..9";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd, bool with_seed, bool with_seeds) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--scheme", scheme_override,
                    "bonus scheme override, NAME[:k]");
    if (with_seed) {
      cmd->add_option("--seed", seed, "run seed")->each([&](const std::string&) {
        seed_set = true;
      });
    }
    if (with_seeds) {
      cmd->add_option("--seeds", seeds_spec, "seed range A..B or list a,b,c");
    }
  };

  auto* cmd_train = app.add_subcommand("train", "single training run");
  add_common(cmd_train, true, false);

  auto* cmd_sweep = app.add_subcommand("sweep", "multi-seed sweep");
  add_common(cmd_sweep, false, true);

  auto* cmd_validate =
      app.add_subcommand("validate-config", "parse and echo the config");
  cmd_validate->add_option("--config", config_path, "JSON config file");

  std::string plot_out = "plot.svg";
  std::vector<std::string> plot_inputs;
  auto* cmd_plot = app.add_subcommand("plot", "aggregate CSVs into an SVG");
  cmd_plot->add_option("--out", plot_out, "output SVG path");
  cmd_plot
      ->add_option("inputs", plot_inputs,
                   "sweep directories or CSV files, optionally label=path")
      ->required();

  std::string schemes_spec = "none,surprisal";
  std::size_t compare_iterations = 100;
  auto* cmd_compare = app.add_subcommand("compare", "scheme comparison matrix");
  add_common(cmd_compare, false, true);
  cmd_compare->add_option("--schemes", schemes_spec,
                          "comma-separated scheme list");
  cmd_compare->add_option("--iterations", compare_iterations,
                          "iterations per run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(cmd_validate)) {
      RunConfig cfg;
      try {
        cfg = load_config_or_default(config_path);
      } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
      }
      std::cout << config_to_json(cfg) << "\n";
      return kExitOk;
    }

    if (app.got_subcommand(cmd_train) || app.got_subcommand(cmd_sweep) ||
        app.got_subcommand(cmd_compare)) {
      RunConfig cfg;
      std::vector<std::uint64_t> seeds;
      try {
        cfg = load_config_or_default(config_path);
        if (!scheme_override.empty()) apply_scheme_override(cfg, scheme_override);
        if (seed_set) cfg.seed = seed;
        validate_config(cfg);
        if (!app.got_subcommand(cmd_train)) {
          seeds = parse_seed_range(seeds_spec);
        }
      } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
      } catch (const std::invalid_argument& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return kExitConfigError;
      }

      if (app.got_subcommand(cmd_train)) {
        const TrainResult res = train(cfg, out_dir);
        std::cout << "run complete: " << res.csv_path.string() << "\n"
                  << "final mean extrinsic return: " << res.final_ret_ext_mean
                  << "\n";
        return kExitOk;
      }
      if (app.got_subcommand(cmd_sweep)) {
        const SweepResult sweep =
            run_sweep(cfg, seeds, out_dir, max_workers_from_env());
        for (const auto& f : sweep.failures) {
          std::cerr << "failed: " << f << "\n";
        }
        write_aggregate_csv(sweep, fs::path(out_dir) / "aggregate.csv");
        std::cout << "sweep complete: " << sweep.csv_paths.size() << "/"
                  << seeds.size() << " seeds, final median return "
                  << (sweep.median.empty() ? 0.0 : sweep.median.back()) << "\n";
        return kExitOk;
      }
      // compare
      const auto schemes = split_commas(schemes_spec);
      if (schemes.empty()) {
        std::cerr << "--schemes: empty list\n";
        return kExitConfigError;
      }
      const auto rows = compare_schemes(cfg, schemes, seeds, compare_iterations,
                                        out_dir, max_workers_from_env());
      const std::string table = format_compare_table(rows);
      std::cout << table;
      std::ofstream(fs::path(out_dir) / "compare.txt") << table;
      return kExitOk;
    }

    if (app.got_subcommand(cmd_plot)) {
      std::vector<PlotSeries> series;
      for (const auto& input : plot_inputs) {
        std::string label, pathstr = input;
        const auto eq = input.find('=');
        if (eq != std::string::npos) {
          label = input.substr(0, eq);
          pathstr = input.substr(eq + 1);
        }
        const fs::path path(pathstr);
        std::vector<fs::path> csvs;
        if (fs::is_directory(path)) {
          csvs = seed_csvs_in(path);
          if (label.empty()) label = path.filename().string();
        } else {
          csvs = {path};
          if (label.empty()) label = path.stem().string();
        }
        if (csvs.empty()) {
          std::cerr << "plot: no seed CSVs under " << path << "\n";
          return kExitRunFailure;
        }
        const SweepResult agg = aggregate_from_csvs(csvs, label);
        series.push_back({agg.label, agg.median, agg.lower_quartile,
                          agg.upper_quartile});
      }
      std::ofstream out(plot_out);
      if (!out) {
        std::cerr << "plot: cannot open " << plot_out << "\n";
        return kExitRunFailure;
      }
      out << emit_plot(series);
      std::cout << "wrote " << plot_out << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitOk;
}
