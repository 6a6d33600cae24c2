#include "surprise/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace surprise {

StepResult Env::step(std::span<const double>) {
  throw std::logic_error("Env::step: not a continuous-action environment");
}

StepResult Env::step_discrete(int) {
  throw std::logic_error("Env::step_discrete: not a discrete-action environment");
}

namespace {

// Sparse continuous mountain car: reward 1 only on escaping the valley at the
// right edge, which also ends the episode.
class SparseMountainCar final : public Env {
 public:
  SparseMountainCar() {
    spec_.name = "sparse-mountaincar";
    spec_.obs_dim = 2;
    spec_.discrete = false;
    spec_.action_dim = 1;
    spec_.action_low = {-1.0};
    spec_.action_high = {1.0};
    spec_.max_episode_len = 500;
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    p_ = rng_.uniform(-0.6, -0.4);
    v_ = 0.0;
    return {p_, v_};
  }


  void set_state(std::span<const double> obs) override {
    p_ = obs[0];
    v_ = obs[1];
  }

  StepResult step(std::span<const double> action) override {
    const double a = std::clamp(action[0], -1.0, 1.0);
    v_ = std::clamp(v_ + 0.001 * a - 0.0025 * std::cos(3.0 * p_), -0.07, 0.07);
    p_ = std::clamp(p_ + v_, -1.2, 0.6);
    StepResult r;
    r.done = p_ >= 0.6;
    r.reward = r.done ? 1.0 : 0.0;
    r.obs = {p_, v_};
    return r;
  }

 private:
  EnvSpec spec_;
  Rng rng_{0};
  double p_ = -0.5, v_ = 0.0;
};

// Sparse cart-pole swing-up: pole starts hanging down; reward 1 per step
// while cos(beta) > 0.8. The episode ends only when the cart leaves the
// track (|x| > 3).
class SparseCartpoleSwingup final : public Env {
 public:
  static constexpr double CART_MASS = 0.5;
  static constexpr double POLE_MASS = 0.5;
  static constexpr double POLE_LENGTH = 0.6;  // full length; lever arm is half
  static constexpr double GRAVITY = 9.82;
  static constexpr double DT = 0.02;
  static constexpr double FORCE_MAX = 10.0;
  static constexpr double TRACK_HALF_LEN = 3.0;

  SparseCartpoleSwingup() {
    spec_.name = "sparse-cartpole-swingup";
    spec_.obs_dim = 4;
    spec_.discrete = false;
    spec_.action_dim = 1;
    spec_.action_low = {-FORCE_MAX};
    spec_.action_high = {FORCE_MAX};
    spec_.max_episode_len = 500;
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    x_ = 0.0;
    xd_ = 0.0;
    beta_ = M_PI + rng_.uniform(-0.05, 0.05);
    betad_ = 0.0;
    return {x_, xd_, beta_, betad_};
  }


  void set_state(std::span<const double> obs) override {
    x_ = obs[0];
    xd_ = obs[1];
    beta_ = obs[2];
    betad_ = obs[3];
  }

  StepResult step(std::span<const double> action) override {
    const double f = std::clamp(action[0], -FORCE_MAX, FORCE_MAX);
    const double l = POLE_LENGTH / 2.0;
    const double total = CART_MASS + POLE_MASS;
    const double sb = std::sin(beta_);
    const double cb = std::cos(beta_);
    // beta = 0 is upright; gravity torque vanishes at beta in {0, pi}.
    const double temp = (f + POLE_MASS * l * betad_ * betad_ * sb) / total;
    const double beta_acc = (GRAVITY * sb - cb * temp) /
                            (l * (4.0 / 3.0 - POLE_MASS * cb * cb / total));
    const double x_acc = temp - POLE_MASS * l * beta_acc * cb / total;

    // semi-implicit Euler: velocities first, then positions
    xd_ += DT * x_acc;
    x_ += DT * xd_;
    betad_ += DT * beta_acc;
    beta_ += DT * betad_;

    StepResult r;
    r.reward = std::cos(beta_) > 0.8 ? 1.0 : 0.0;
    r.done = std::abs(x_) > TRACK_HALF_LEN;
    r.obs = {x_, xd_, beta_, betad_};
    return r;
  }

 private:
  EnvSpec spec_;
  Rng rng_{0};
  double x_ = 0.0, xd_ = 0.0, beta_ = M_PI, betad_ = 0.0;
};

// Stochastic 40-cell chain. Moves succeed with probability 0.8, otherwise the
// agent stays put. Reaching the last cell pays 1 and ends the episode;
// stepping off the left end is a death (done, no reward).
class NoisyChain final : public Env {
 public:
  static constexpr int N_CELLS = 40;
  static constexpr double MOVE_SUCCESS_PROB = 0.8;

  NoisyChain() {
    spec_.name = "noisy-chain";
    spec_.obs_dim = 2;
    spec_.discrete = true;
    spec_.action_dim = 2;  // 0 = left, 1 = right
    spec_.max_episode_len = 500;
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    cell_ = 1;
    return obs();
  }


  void set_state(std::span<const double> obs) override {
    cell_ = static_cast<int>(std::lround(obs[0] * N_CELLS));
  }

  StepResult step_discrete(int action) override {
    if (action != 0 && action != 1) {
      throw std::invalid_argument("NoisyChain: action must be 0 or 1");
    }
    const bool success = rng_.uniform() < MOVE_SUCCESS_PROB;
    if (success) cell_ += (action == 1) ? 1 : -1;
    StepResult r;
    if (cell_ >= N_CELLS) {
      r.reward = 1.0;
      r.done = true;
    } else if (cell_ <= 0) {
      r.reward = 0.0;  // death
      r.done = true;
    }
    r.obs = obs();
    return r;
  }

 private:
  std::vector<double> obs() const {
    return {static_cast<double>(cell_) / N_CELLS, 1.0};
  }

  EnvSpec spec_;
  Rng rng_{0};
  int cell_ = 1;
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "sparse-mountaincar") return std::make_unique<SparseMountainCar>();
  if (name == "sparse-cartpole-swingup") {
    return std::make_unique<SparseCartpoleSwingup>();
  }
  if (name == "noisy-chain") return std::make_unique<NoisyChain>();
  throw std::invalid_argument("make_env: unknown environment '" + name + "'");
}

std::vector<std::string> env_names() {
  return {"sparse-mountaincar", "sparse-cartpole-swingup", "noisy-chain"};
}

}  // namespace surprise
