#include "surprise/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace surprise {

namespace {

class BinWriter {
 public:
  explicit BinWriter(const std::filesystem::path& path)
      : out_(path, std::ios::binary) {
    if (!out_) {
      throw std::runtime_error("BinWriter: cannot open " + path.string());
    }
  }

  void u32(std::uint32_t v) { le_bytes(&v, sizeof(v)); }
  void u64(std::uint64_t v) { le_bytes(&v, sizeof(v)); }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    u64(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void f64s(std::span<const double> xs) {
    u64(xs.size());
    for (double x : xs) f64(x);
  }
  void magic(const char m[4]) { out_.write(m, 4); }

 private:
  void le_bytes(const void* p, std::size_t n) {
    unsigned char buf[8];
    std::memcpy(buf, p, n);
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < n / 2; ++i) std::swap(buf[i], buf[n - 1 - i]);
    }
    out_.write(reinterpret_cast<const char*>(buf),
               static_cast<std::streamsize>(n));
  }

  std::ofstream out_;
};

class BinReader {
 public:
  explicit BinReader(const std::filesystem::path& path)
      : in_(path, std::ios::binary) {
    if (!in_) {
      throw std::runtime_error("BinReader: cannot open " + path.string());
    }
  }

  std::uint32_t u32() {
    std::uint32_t v;
    le_bytes(&v, sizeof(v));
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    le_bytes(&v, sizeof(v));
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    std::string s(n, '\0');
    in_.read(s.data(), n);
    check();
    return s;
  }
  std::vector<double> f64s() {
    const std::uint64_t n = u64();
    std::vector<double> xs(n);
    for (auto& x : xs) x = f64();
    return xs;
  }
  void expect_magic(const char m[4]) {
    char buf[4];
    in_.read(buf, 4);
    check();
    if (std::memcmp(buf, m, 4) != 0) {
      throw std::runtime_error("checkpoint: bad magic");
    }
  }

 private:
  void le_bytes(void* p, std::size_t n) {
    unsigned char buf[8];
    in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
    check();
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < n / 2; ++i) std::swap(buf[i], buf[n - 1 - i]);
    }
    std::memcpy(p, buf, n);
  }
  void check() {
    if (!in_) throw std::runtime_error("checkpoint: truncated file");
  }

  std::ifstream in_;
};

void write_param_vector(BinWriter& w, const ParamVector& pv) {
  w.u32(static_cast<std::uint32_t>(pv.layout().size()));
  for (const auto& seg : pv.layout()) {
    w.str(seg.name);
    w.u32(static_cast<std::uint32_t>(seg.shape.size()));
    for (std::size_t s : seg.shape) w.u64(s);
  }
  w.f64s(pv.data());
}

ParamVector read_param_vector(BinReader& r) {
  const std::uint32_t nseg = r.u32();
  std::vector<ParamSegment> layout(nseg);
  for (auto& seg : layout) {
    seg.name = r.str();
    const std::uint32_t rank = r.u32();
    seg.shape.resize(rank);
    for (auto& s : seg.shape) s = r.u64();
  }
  ParamVector pv{layout};
  const std::vector<double> data = r.f64s();
  if (data.size() != pv.size()) {
    throw std::runtime_error("checkpoint: parameter length mismatch");
  }
  std::copy(data.begin(), data.end(), pv.data().begin());
  return pv;
}

void write_sizes(BinWriter& w, const std::vector<std::size_t>& xs) {
  w.u32(static_cast<std::uint32_t>(xs.size()));
  for (std::size_t x : xs) w.u64(x);
}

std::vector<std::size_t> read_sizes(BinReader& r) {
  std::vector<std::size_t> xs(r.u32());
  for (auto& x : xs) x = r.u64();
  return xs;
}

void write_model(BinWriter& w, const DynamicsModel& model) {
  const auto& cfg = model.config();
  w.u64(cfg.state_dim);
  w.u64(cfg.action_dim);
  write_sizes(w, cfg.hidden);
  w.u64(cfg.seed);
  w.f64(cfg.log_std_min);
  w.f64(cfg.log_std_max);
  write_param_vector(w, model.params());
  w.f64s(model.input_normalizer().state());
  w.f64s(model.target_normalizer().state());
}

DynamicsModel read_model(BinReader& r) {
  DynamicsModelConfig cfg;
  cfg.state_dim = r.u64();
  cfg.action_dim = r.u64();
  cfg.hidden = read_sizes(r);
  cfg.seed = r.u64();
  cfg.log_std_min = r.f64();
  cfg.log_std_max = r.f64();
  DynamicsModel model(cfg);
  model.set_params(read_param_vector(r));
  const auto in_state = r.f64s();
  const auto target_state = r.f64s();
  model.restore_normalizer_state(in_state, target_state);
  return model;
}

}  // namespace

void save_dynamics_model(const DynamicsModel& model,
                         const std::filesystem::path& path) {
  BinWriter w(path);
  w.magic("SRLM");
  w.u32(1);  // version
  write_model(w, model);
}

DynamicsModel load_dynamics_model(const std::filesystem::path& path) {
  BinReader r(path);
  r.expect_magic("SRLM");
  const std::uint32_t version = r.u32();
  if (version != 1) throw std::runtime_error("model checkpoint: bad version");
  return read_model(r);
}

void save_checkpoint(const Checkpoint& ckpt,
                     const std::filesystem::path& path) {
  BinWriter w(path);
  w.magic("SRLC");
  w.u32(1);
  w.u64(ckpt.iteration);
  w.u32(ckpt.policy_spec.kind == PolicySpec::Kind::kGaussian ? 0 : 1);
  w.u64(ckpt.policy_spec.obs_dim);
  w.u64(ckpt.policy_spec.act_dim);
  write_sizes(w, ckpt.policy_spec.hidden);
  w.u64(ckpt.policy_spec.seed);
  w.f64(ckpt.policy_spec.init_log_std);
  w.f64(ckpt.policy_spec.log_std_min);
  w.f64(ckpt.policy_spec.log_std_max);
  write_param_vector(w, ckpt.policy_params);
  w.f64s(ckpt.policy_obs_norm_state);
  w.u32(ckpt.has_model ? 1 : 0);
  if (ckpt.has_model) {
    w.u64(ckpt.model_config.state_dim);
    w.u64(ckpt.model_config.action_dim);
    write_sizes(w, ckpt.model_config.hidden);
    w.u64(ckpt.model_config.seed);
    w.f64(ckpt.model_config.log_std_min);
    w.f64(ckpt.model_config.log_std_max);
    write_param_vector(w, ckpt.model_params);
    w.f64s(ckpt.model_in_norm_state);
    w.f64s(ckpt.model_target_norm_state);
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  BinReader r(path);
  r.expect_magic("SRLC");
  const std::uint32_t version = r.u32();
  if (version != 1) throw std::runtime_error("checkpoint: bad version");
  Checkpoint ckpt;
  ckpt.iteration = r.u64();
  ckpt.policy_spec.kind =
      r.u32() == 0 ? PolicySpec::Kind::kGaussian : PolicySpec::Kind::kCategorical;
  ckpt.policy_spec.obs_dim = r.u64();
  ckpt.policy_spec.act_dim = r.u64();
  ckpt.policy_spec.hidden = read_sizes(r);
  ckpt.policy_spec.seed = r.u64();
  ckpt.policy_spec.init_log_std = r.f64();
  ckpt.policy_spec.log_std_min = r.f64();
  ckpt.policy_spec.log_std_max = r.f64();
  ckpt.policy_params = read_param_vector(r);
  ckpt.policy_obs_norm_state = r.f64s();
  ckpt.has_model = r.u32() != 0;
  if (ckpt.has_model) {
    ckpt.model_config.state_dim = r.u64();
    ckpt.model_config.action_dim = r.u64();
    ckpt.model_config.hidden = read_sizes(r);
    ckpt.model_config.seed = r.u64();
    ckpt.model_config.log_std_min = r.f64();
    ckpt.model_config.log_std_max = r.f64();
    ckpt.model_params = read_param_vector(r);
    ckpt.model_in_norm_state = r.f64s();
    ckpt.model_target_norm_state = r.f64s();
  }
  return ckpt;
}

}  // namespace surprise
