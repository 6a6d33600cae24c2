#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "surprise/config.hpp"
#include "surprise/csv.hpp"
#include "surprise/plot.hpp"
#include "surprise/sweep.hpp"

using namespace surprise;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig tiny_config() {
  RunConfig cfg;
  cfg.env = "noisy-chain";
  cfg.iterations = 3;
  cfg.deterministic_timing = true;
  cfg.bonus.scheme = BonusScheme::kSurprisal;
  cfg.policy_hidden = {8};
  cfg.value_hidden = {8};
  cfg.dynamics_hidden = {8};
  cfg.batch_size = 200;
  cfg.max_len = 40;
  cfg.dynamics_batch_size = 200;
  cfg.replay_capacity = 5000;
  cfg.checkpoint_every = 0;
  return cfg;
}

// Minimal XML well-formedness check: tag balance, attribute quoting, one root.
bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  int roots = 0;
  if (text.rfind("<?xml", 0) == 0) i = text.find("?>") + 2;
  while (i < text.size()) {
    if (text[i] != '<') {
      ++i;
      continue;
    }
    const std::size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '!' || tag[0] == '?') continue;
    bool closing = tag[0] == '/';
    bool self_closing = tag.back() == '/';
    if (closing) tag = tag.substr(1);
    if (self_closing) tag.pop_back();
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
    if (name.empty()) return false;
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
      if (stack.empty()) ++roots;
    } else if (!self_closing) {
      if (stack.empty() && roots > 0) return false;
      stack.push_back(name);
    } else if (stack.empty()) {
      return false;  // self-closing root only would be odd for svg
    }
  }
  return stack.empty() && roots == 1;
}

}  // namespace

TEST_CASE("parse_config: defaults, validation, overrides") {
  SUBCASE("empty text yields the documented defaults") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg.env == "sparse-mountaincar");
    CHECK(cfg.iterations == 150);
    CHECK(cfg.bonus.scheme == BonusScheme::kSurprisal);
    CHECK(cfg.bonus.eta0 == 0.001);
    CHECK(cfg.delta_kl == 0.01);
    CHECK(cfg.batch_size == 5000);
    CHECK(cfg.max_len == 500);
    CHECK(cfg.gamma == 0.995);
    CHECK(cfg.lambda == 0.95);
    CHECK(cfg.kappa == 0.001);
    CHECK(cfg.alpha == 1.0);
    CHECK(cfg.replay_capacity == 200000);
  }

  SUBCASE("invalid values are reported with field names") {
    try {
      parse_config(R"({"bonus": {"eta0": -1}})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      REQUIRE(e.issues().size() == 1);
      CHECK(e.issues()[0].find("bonus.eta0") != std::string::npos);
    }
  }

  SUBCASE("all problems are listed at once") {
    try {
      parse_config(R"({"bonus": {"eta0": -1, "bogus": 3}, "trpo": {"gamma": 2}})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      // unknown key plus both range violations
      CHECK(e.issues().size() == 3);
    }
  }

  SUBCASE("unknown sections and keys are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"nonsense": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"run": {"typo_key": 1}})"), ConfigError);
  }

  SUBCASE("learning-progress k is stored") {
    const RunConfig cfg =
        parse_config(R"({"bonus": {"scheme": "learning_progress", "k": 10}})");
    CHECK(cfg.bonus.scheme == BonusScheme::kLearningProgress);
    CHECK(cfg.bonus.k == 10);
  }

  SUBCASE("scheme override string") {
    RunConfig cfg = parse_config("");
    apply_scheme_override(cfg, "learning_progress:10");
    CHECK(cfg.bonus.scheme == BonusScheme::kLearningProgress);
    CHECK(cfg.bonus.k == 10);
    CHECK_THROWS_AS(apply_scheme_override(cfg, "bogus"), ConfigError);
    CHECK_THROWS_AS(apply_scheme_override(cfg, "surprisal:zero"), ConfigError);
  }

  SUBCASE("resolved config round-trips through JSON") {
    RunConfig cfg = parse_config("");
    cfg.bonus.scheme = BonusScheme::kPredError;
    cfg.iterations = 77;
    cfg.shift_mode = RunConfig::ShiftMode::kOn;
    const RunConfig back = parse_config(config_to_json(cfg));
    CHECK(back.bonus.scheme == BonusScheme::kPredError);
    CHECK(back.iterations == 77);
    CHECK(back.shift_mode == RunConfig::ShiftMode::kOn);
  }
}

TEST_CASE("quantile aggregation") {
  SUBCASE("single sample: median equals it, zero-width IQR") {
    CHECK(quantile_type7({5.0}, 0.5) == 5.0);
    CHECK(quantile_type7({5.0}, 0.25) == 5.0);
    CHECK(quantile_type7({5.0}, 0.75) == 5.0);
  }

  SUBCASE("three runs at {0, 10, 20}: interpolated quartiles") {
    const std::vector<double> xs = {0.0, 10.0, 20.0};
    CHECK(quantile_type7(xs, 0.5) == doctest::Approx(10.0));
    CHECK(quantile_type7(xs, 0.25) == doctest::Approx(5.0));
    CHECK(quantile_type7(xs, 0.75) == doctest::Approx(15.0));
  }

  SUBCASE("aggregation is invariant to sample order") {
    CHECK(quantile_type7({3.0, 1.0, 2.0}, 0.5) ==
          quantile_type7({1.0, 2.0, 3.0}, 0.5));
  }
}

TEST_CASE("csv writer and parser round trip") {
  const fs::path dir = fresh_dir("surprise_csv_roundtrip");
  const fs::path path = dir / "log.csv";
  std::vector<std::vector<double>> rows = {
      std::vector<double>(csv_columns().size(), 0.0),
      std::vector<double>(csv_columns().size(), 0.0)};
  rows[0][0] = 0;
  rows[0][2] = 0.12345678901234567;
  rows[0][7] = std::nan("");
  rows[1][0] = 1;
  rows[1][2] = -3.25;
  {
    CsvWriter writer(path);
    writer.append(rows[0]);
    writer.append(rows[1]);
  }
  const CsvFile parsed = parse_csv_file(path);
  CHECK(parsed.schema_version == kCsvSchemaVersion);
  REQUIRE(parsed.columns == csv_columns());
  REQUIRE(parsed.rows.size() == 2);
  CHECK(parsed.rows[0][2] == rows[0][2]);  // full precision round trip
  CHECK(std::isnan(parsed.rows[0][7]));
  CHECK(parsed.rows[1][2] == -3.25);
  fs::remove_all(dir);
}

TEST_CASE("sweep: determinism and quartile curves") {
  const RunConfig cfg = tiny_config();
  const fs::path d1 = fresh_dir("surprise_sweep_1");
  const fs::path d2 = fresh_dir("surprise_sweep_2");
  const std::vector<std::uint64_t> seeds = {0, 1, 2};
  const SweepResult s1 = run_sweep(cfg, seeds, d1, 2);
  const SweepResult s2 = run_sweep(cfg, seeds, d2, 1);
  REQUIRE(s1.csv_paths.size() == 3);
  REQUIRE(s1.median.size() == cfg.iterations);
  CHECK(s1.failures.empty());
  // identical regardless of worker count and rerun
  CHECK(s1.median == s2.median);
  CHECK(s1.lower_quartile == s2.lower_quartile);
  CHECK(s1.upper_quartile == s2.upper_quartile);
  for (std::size_t i = 0; i < s1.median.size(); ++i) {
    CHECK(s1.lower_quartile[i] <= s1.median[i]);
    CHECK(s1.median[i] <= s1.upper_quartile[i]);
  }
  // re-aggregation from the CSVs matches the in-memory aggregation
  const SweepResult from_csv = aggregate_from_csvs(s1.csv_paths, "x");
  CHECK(from_csv.median == s1.median);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("compare_schemes rows") {
  RunConfig cfg = tiny_config();
  cfg.iterations = 2;
  const fs::path dir = fresh_dir("surprise_compare");
  const auto rows = compare_schemes(cfg, {"none", "none", "surprisal"},
                                    {0, 1}, 2, dir, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].scheme == "none");
  CHECK(rows[0].final_median_return == rows[1].final_median_return);
  CHECK(rows[0].mean_bonus_ms == rows[1].mean_bonus_ms);
  const std::string table = format_compare_table(rows);
  CHECK(table.find("surprisal") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("emit_plot produces well-formed SVG with ordered bands") {
  SUBCASE("flat zero series draws a horizontal line at zero") {
    PlotSeries flat;
    flat.label = "none";
    flat.median.assign(10, 0.0);
    flat.lower.assign(10, 0.0);
    flat.upper.assign(10, 0.0);
    const std::string svg = emit_plot({flat});
    CHECK(xml_well_formed(svg));
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("iterations of training") != std::string::npos);
    CHECK(svg.find("average undiscounted return") != std::string::npos);
    // all polyline y coordinates identical
    const auto p0 = svg.find("<polyline points=\"");
    const auto p1 = svg.find('"', p0 + 18);
    const std::string pts = svg.substr(p0 + 18, p1 - p0 - 18);
    std::stringstream ss(pts);
    std::string pair;
    double y_first = -1.0;
    while (ss >> pair) {
      const double y = std::stod(pair.substr(pair.find(',') + 1));
      if (y_first < 0) y_first = y;
      CHECK(y == doctest::Approx(y_first));
    }
  }

  SUBCASE("escapes labels") {
    PlotSeries s;
    s.label = "a<b & c";
    s.median = {0.0, 1.0};
    s.lower = {0.0, 0.5};
    s.upper = {0.5, 1.5};
    const std::string svg = emit_plot({s});
    CHECK(xml_well_formed(svg));
    CHECK(svg.find("a&lt;b &amp; c") != std::string::npos);
  }
}

TEST_CASE("cli binary: exit codes and plot output") {
  const fs::path dir = fresh_dir("surprise_cli");
  const std::string bin = SURPRISE_RL_BIN;

  auto run = [&](const std::string& args) {
    const std::string cmd = bin + " " + args + " > " +
                            (dir / "out.txt").string() + " 2> " +
                            (dir / "err.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  SUBCASE("validate-config on defaults succeeds") {
    CHECK(run("validate-config") == 0);
  }

  SUBCASE("bad config exits with code 2") {
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"bonus": {"eta0": -3}})";
    CHECK(run("validate-config --config " + bad.string()) == 2);
    CHECK(run("train --config " + bad.string()) == 2);
  }

  SUBCASE("train then plot end to end") {
    const fs::path cfg_path = dir / "cfg.json";
    std::ofstream(cfg_path) << R"({
      "run": {"env": "noisy-chain", "iterations": 2, "checkpoint_every": 0},
      "policy": {"hidden": [8]},
      "value": {"hidden": [8]},
      "dynamics": {"hidden": [8], "batch_size": 150},
      "trpo": {"batch_size": 150, "max_len": 30}
    })";
    const fs::path run_dir = dir / "run";
    CHECK(run("train --config " + cfg_path.string() + " --seed 3 --out " +
              run_dir.string()) == 0);
    CHECK(fs::exists(run_dir / "seed_3.csv"));
    const fs::path svg = dir / "plot.svg";
    CHECK(run("plot --out " + svg.string() + " " + run_dir.string()) == 0);
    CHECK(fs::exists(svg));
    std::ifstream in(svg);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("<svg") != std::string::npos);
  }

  fs::remove_all(dir);
}
