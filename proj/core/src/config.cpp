#include "surprise/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace surprise {

using nlohmann::json;

bool RunConfig::nonnegative_shift_resolved() const {
  switch (shift_mode) {
    case ShiftMode::kOn: return true;
    case ShiftMode::kOff: return false;
    case ShiftMode::kAuto: return env == "noisy-chain";
  }
  return false;
}

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error([&issues] {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& s : issues) os << "\n  - " << s;
        return os.str();
      }()),
      issues_(std::move(issues)) {}

namespace {

class Parser {
 public:
  explicit Parser(RunConfig& cfg) : cfg_(cfg) {}

  void section(const json& j, const std::string& name) {
    if (!j.is_object()) {
      fail(name + ": expected an object");
      return;
    }
    for (const auto& [key, value] : j.items()) {
      if (!handle(name, key, value)) {
        fail(name + "." + key + ": unknown key");
      }
    }
  }

  void fail(const std::string& msg) { issues_.push_back(msg); }
  std::vector<std::string> take_issues() { return std::move(issues_); }

 private:
  bool handle(const std::string& sec, const std::string& key, const json& v) {
    const std::string where = sec + "." + key;
    auto num = [&](double& out) {
      if (!v.is_number()) { fail(where + ": expected a number"); return; }
      out = v.get<double>();
    };
    auto uint_val = [&](std::size_t& out) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        fail(where + ": expected a nonnegative integer");
        return;
      }
      out = v.get<std::size_t>();
    };
    auto int_val = [&](int& out) {
      if (!v.is_number_integer()) { fail(where + ": expected an integer"); return; }
      out = v.get<int>();
    };
    auto bool_val = [&](bool& out) {
      if (!v.is_boolean()) { fail(where + ": expected a boolean"); return; }
      out = v.get<bool>();
    };
    auto str_val = [&](std::string& out) {
      if (!v.is_string()) { fail(where + ": expected a string"); return; }
      out = v.get<std::string>();
    };
    auto sizes_val = [&](std::vector<std::size_t>& out) {
      if (!v.is_array()) { fail(where + ": expected an array of sizes"); return; }
      std::vector<std::size_t> tmp;
      for (const auto& e : v) {
        if (!e.is_number_integer() || e.get<long long>() < 1) {
          fail(where + ": sizes must be integers >= 1");
          return;
        }
        tmp.push_back(e.get<std::size_t>());
      }
      out = std::move(tmp);
    };

    if (sec == "run") {
      if (key == "env") { str_val(cfg_.env); return true; }
      if (key == "iterations") { uint_val(cfg_.iterations); return true; }
      if (key == "seed") {
        if (!v.is_number_integer()) { fail(where + ": expected an integer"); return true; }
        cfg_.seed = v.get<std::uint64_t>();
        return true;
      }
      if (key == "checkpoint_every") { uint_val(cfg_.checkpoint_every); return true; }
      if (key == "deterministic_timing") { bool_val(cfg_.deterministic_timing); return true; }
      return false;
    }
    if (sec == "bonus") {
      if (key == "scheme") {
        std::string s;
        str_val(s);
        if (!s.empty()) {
          try {
            cfg_.bonus.scheme = bonus_scheme_from_string(s);
          } catch (const std::exception& e) {
            fail(where + ": " + e.what());
          }
        }
        return true;
      }
      if (key == "k") { uint_val(cfg_.bonus.k); return true; }
      if (key == "eta0") { num(cfg_.bonus.eta0); return true; }
      if (key == "nonnegative_shift") {
        if (v.is_boolean()) {
          cfg_.shift_mode = v.get<bool>() ? RunConfig::ShiftMode::kOn
                                          : RunConfig::ShiftMode::kOff;
        } else if (v.is_string() && v.get<std::string>() == "auto") {
          cfg_.shift_mode = RunConfig::ShiftMode::kAuto;
        } else {
          fail(where + ": expected true, false or \"auto\"");
        }
        return true;
      }
      return false;
    }
    if (sec == "policy") {
      if (key == "hidden") { sizes_val(cfg_.policy_hidden); return true; }
      if (key == "init_log_std") { num(cfg_.policy_init_log_std); return true; }
      return false;
    }
    if (sec == "value") {
      if (key == "kind") {
        std::string s;
        str_val(s);
        if (s == "neural") cfg_.value_kind = RunConfig::ValueKind::kNeural;
        else if (s == "linear") cfg_.value_kind = RunConfig::ValueKind::kLinear;
        else if (!s.empty()) fail(where + ": expected \"neural\" or \"linear\"");
        return true;
      }
      if (key == "hidden") { sizes_val(cfg_.value_hidden); return true; }
      if (key == "delta") { num(cfg_.value_delta); return true; }
      return false;
    }
    if (sec == "dynamics") {
      if (key == "hidden") { sizes_val(cfg_.dynamics_hidden); return true; }
      if (key == "kappa") { num(cfg_.kappa); return true; }
      if (key == "alpha") { num(cfg_.alpha); return true; }
      if (key == "batch_size") { uint_val(cfg_.dynamics_batch_size); return true; }
      if (key == "replay_capacity") { uint_val(cfg_.replay_capacity); return true; }
      if (key == "updates_per_iteration") {
        uint_val(cfg_.model_updates_per_iteration);
        return true;
      }
      if (key == "log_std_min") { num(cfg_.log_std_min); return true; }
      if (key == "log_std_max") { num(cfg_.log_std_max); return true; }
      return false;
    }
    if (sec == "trpo") {
      if (key == "delta_kl") { num(cfg_.delta_kl); return true; }
      if (key == "batch_size") { uint_val(cfg_.batch_size); return true; }
      if (key == "max_len") { uint_val(cfg_.max_len); return true; }
      if (key == "gamma") { num(cfg_.gamma); return true; }
      if (key == "lambda") { num(cfg_.lambda); return true; }
      if (key == "cg_iters") { int_val(cfg_.cg_iters); return true; }
      if (key == "damping") { num(cfg_.damping); return true; }
      if (key == "backtrack_ratio") { num(cfg_.backtrack_ratio); return true; }
      if (key == "max_backtracks") { int_val(cfg_.max_backtracks); return true; }
      if (key == "subsample_fraction") { num(cfg_.subsample_fraction); return true; }
      if (key == "strict_appendix_a") { bool_val(cfg_.strict_appendix_a); return true; }
      return false;
    }
    return false;
  }

  RunConfig& cfg_;
  std::vector<std::string> issues_;
};

const char* const kSections[] = {"run",   "bonus",    "policy",
                                 "value", "dynamics", "trpo"};

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::string trimmed;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
  }
  if (trimmed.empty()) {
    validate_config(cfg);
    return cfg;
  }
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  if (!root.is_object()) {
    throw ConfigError({"top level must be a JSON object of sections"});
  }
  Parser parser(cfg);
  for (const auto& [key, value] : root.items()) {
    bool known = false;
    for (const char* s : kSections) {
      if (key == s) {
        parser.section(value, key);
        known = true;
        break;
      }
    }
    if (!known) parser.fail(key + ": unknown section");
  }
  auto issues = parser.take_issues();
  for (const auto& extra : validation_issues(cfg)) issues.push_back(extra);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError({"cannot open config file: " + path.string()});
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> validation_issues(const RunConfig& cfg) {
  std::vector<std::string> issues;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };
  check(cfg.env == "sparse-mountaincar" || cfg.env == "sparse-cartpole-swingup" ||
            cfg.env == "noisy-chain",
        "run.env: unknown environment '" + cfg.env + "'");
  check(cfg.iterations >= 1, "run.iterations: must be >= 1");
  check(cfg.bonus.eta0 > 0.0, "bonus.eta0: must be positive");
  check(cfg.bonus.k >= 1, "bonus.k: must be >= 1");
  check(cfg.value_delta > 0.0, "value.delta: must be positive");
  check(cfg.kappa >= 0.0, "dynamics.kappa: must be nonnegative");
  check(cfg.alpha >= 0.0, "dynamics.alpha: must be nonnegative");
  check(cfg.dynamics_batch_size >= 1, "dynamics.batch_size: must be >= 1");
  check(cfg.replay_capacity >= 1, "dynamics.replay_capacity: must be >= 1");
  check(cfg.log_std_min < cfg.log_std_max,
        "dynamics.log_std_min: must be below log_std_max");
  check(cfg.delta_kl > 0.0, "trpo.delta_kl: must be positive");
  check(cfg.batch_size >= 1, "trpo.batch_size: must be >= 1");
  check(cfg.max_len >= 1, "trpo.max_len: must be >= 1");
  check(cfg.gamma > 0.0 && cfg.gamma <= 1.0, "trpo.gamma: must be in (0, 1]");
  check(cfg.lambda >= 0.0 && cfg.lambda <= 1.0,
        "trpo.lambda: must be in [0, 1]");
  check(cfg.cg_iters >= 1, "trpo.cg_iters: must be >= 1");
  check(cfg.damping >= 0.0, "trpo.damping: must be nonnegative");
  check(cfg.backtrack_ratio > 0.0 && cfg.backtrack_ratio < 1.0,
        "trpo.backtrack_ratio: must be in (0, 1)");
  check(cfg.max_backtracks >= 0, "trpo.max_backtracks: must be >= 0");
  check(cfg.subsample_fraction > 0.0 && cfg.subsample_fraction <= 1.0,
        "trpo.subsample_fraction: must be in (0, 1]");
  return issues;
}

void validate_config(const RunConfig& cfg) {
  auto issues = validation_issues(cfg);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["run"] = {{"env", cfg.env},
              {"iterations", cfg.iterations},
              {"seed", cfg.seed},
              {"checkpoint_every", cfg.checkpoint_every},
              {"deterministic_timing", cfg.deterministic_timing}};
  json shift;
  switch (cfg.shift_mode) {
    case RunConfig::ShiftMode::kAuto: shift = "auto"; break;
    case RunConfig::ShiftMode::kOn: shift = true; break;
    case RunConfig::ShiftMode::kOff: shift = false; break;
  }
  j["bonus"] = {{"scheme", to_string(cfg.bonus.scheme)},
                {"k", cfg.bonus.k},
                {"eta0", cfg.bonus.eta0},
                {"nonnegative_shift", shift}};
  j["policy"] = {{"hidden", cfg.policy_hidden},
                 {"init_log_std", cfg.policy_init_log_std}};
  j["value"] = {{"kind", cfg.value_kind == RunConfig::ValueKind::kNeural
                             ? "neural"
                             : "linear"},
                {"hidden", cfg.value_hidden},
                {"delta", cfg.value_delta}};
  j["dynamics"] = {{"hidden", cfg.dynamics_hidden},
                   {"kappa", cfg.kappa},
                   {"alpha", cfg.alpha},
                   {"batch_size", cfg.dynamics_batch_size},
                   {"replay_capacity", cfg.replay_capacity},
                   {"updates_per_iteration", cfg.model_updates_per_iteration},
                   {"log_std_min", cfg.log_std_min},
                   {"log_std_max", cfg.log_std_max}};
  j["trpo"] = {{"delta_kl", cfg.delta_kl},
               {"batch_size", cfg.batch_size},
               {"max_len", cfg.max_len},
               {"gamma", cfg.gamma},
               {"lambda", cfg.lambda},
               {"cg_iters", cfg.cg_iters},
               {"damping", cfg.damping},
               {"backtrack_ratio", cfg.backtrack_ratio},
               {"max_backtracks", cfg.max_backtracks},
               {"subsample_fraction", cfg.subsample_fraction},
               {"strict_appendix_a", cfg.strict_appendix_a}};
  return j.dump(2);
}

void apply_scheme_override(RunConfig& cfg, const std::string& scheme_spec) {
  std::string name = scheme_spec;
  const auto colon = scheme_spec.find(':');
  if (colon != std::string::npos) {
    name = scheme_spec.substr(0, colon);
    const std::string karg = scheme_spec.substr(colon + 1);
    try {
      const long k = std::stol(karg);
      if (k < 1) throw std::invalid_argument("k");
      cfg.bonus.k = static_cast<std::size_t>(k);
    } catch (const std::exception&) {
      throw ConfigError({"--scheme: bad k value '" + karg + "'"});
    }
  }
  try {
    cfg.bonus.scheme = bonus_scheme_from_string(name);
  } catch (const std::exception& e) {
    throw ConfigError({std::string("--scheme: ") + e.what()});
  }
}

}  // namespace surprise
