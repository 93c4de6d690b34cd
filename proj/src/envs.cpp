#include "cdpo/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdpo::env {

namespace {

uint64_t slot_seed(uint64_t seed, int slot) {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(slot + 1)));
}

}  // namespace

std::string to_string(EnvKind kind) {
  return kind == EnvKind::CartPole ? "cartpole" : "carterpillar";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "cartpole") return EnvKind::CartPole;
  if (name == "carterpillar") return EnvKind::Carterpillar;
  throw std::invalid_argument("unknown environment: " + name);
}

void EnvConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0))
      throw std::invalid_argument(std::string(what) + " must be positive");
  };
  positive(gravity, "gravity");
  positive(spring_k, "spring_k");
  positive(damper_b, "damper_b");
  positive(dt, "dt");
  positive(force_mag, "force_mag");
  positive(cart_mass, "cart_mass");
  positive(pole_mass, "pole_mass");
  positive(pole_half_length, "pole_half_length");
  positive(position_limit, "position_limit");
  positive(angle_limit, "angle_limit");
  if (max_episode_steps <= 0)
    throw std::invalid_argument("max_episode_steps must be positive");
  if (kind == EnvKind::Carterpillar && carts < 1)
    throw std::invalid_argument("carts must be >= 1");
}

void cartpole_accel(double theta, double theta_dot, double force,
                    const EnvConfig& cfg, double& x_acc, double& theta_acc) {
  const double total_mass = cfg.cart_mass + cfg.pole_mass;
  const double pml = cfg.pole_mass * cfg.pole_half_length;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + pml * theta_dot * theta_dot * sin_t) / total_mass;
  theta_acc = (cfg.gravity * sin_t - cos_t * temp) /
              (cfg.pole_half_length *
               (4.0 / 3.0 - cfg.pole_mass * cos_t * cos_t / total_mass));
  x_acc = temp - pml * theta_acc * cos_t / total_mass;
}

CartPoleState cartpole_integrate(const CartPoleState& s, double force,
                                 const EnvConfig& cfg) {
  double x_acc = 0.0, theta_acc = 0.0;
  cartpole_accel(s.theta, s.theta_dot, force, cfg, x_acc, theta_acc);
  CartPoleState out = s;
  out.x_dot = s.x_dot + cfg.dt * x_acc;
  out.x = s.x + cfg.dt * out.x_dot;
  out.theta_dot = s.theta_dot + cfg.dt * theta_acc;
  out.theta = s.theta + cfg.dt * out.theta_dot;
  return out;
}

void coupling_forces(std::span<const double> positions,
                     std::span<const double> velocities, double k, double b,
                     std::span<double> forces) {
  const size_t n = positions.size();
  for (size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      f += k * (positions[j] - positions[i]) +
           b * (velocities[j] - velocities[i]);
    }
    forces[i] = f;
  }
}

std::vector<double> coupling_forces(std::span<const double> positions,
                                    std::span<const double> velocities,
                                    double k, double b) {
  std::vector<double> forces(positions.size());
  coupling_forces(positions, velocities, k, b, forces);
  return forces;
}

CartPoleEnv::CartPoleEnv(const EnvConfig& cfg, uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  cfg_.validate();
  reset();
}

std::vector<double> CartPoleEnv::reset() {
  state_.x = rng_.uniform(-0.05, 0.05);
  state_.x_dot = rng_.uniform(-0.05, 0.05);
  state_.theta = rng_.uniform(-0.05, 0.05);
  state_.theta_dot = rng_.uniform(-0.05, 0.05);
  steps_ = 0;
  done_ = false;
  return observation();
}

std::vector<double> CartPoleEnv::observation() const {
  return {state_.x, state_.x_dot, state_.theta, state_.theta_dot};
}

void CartPoleEnv::set_state(const CartPoleState& s) {
  state_ = s;
  done_ = false;
}

StepResult CartPoleEnv::step(int action) {
  if (action != 0 && action != 1)
    throw std::invalid_argument("cartpole: action must be 0 or 1");
  if (done_) throw std::logic_error("cartpole: step after episode end");

  const double force = action == 1 ? cfg_.force_mag : -cfg_.force_mag;
  state_ = cartpole_integrate(state_, force, cfg_);
  steps_ += 1;

  StepResult r;
  r.observation = observation();
  r.reward = 1.0;
  r.terminated = std::abs(state_.x) > cfg_.position_limit ||
                 std::abs(state_.theta) > cfg_.angle_limit;
  r.truncated = steps_ >= cfg_.max_episode_steps;
  done_ = r.terminated || r.truncated;
  return r;
}

CarterpillarEnv::CarterpillarEnv(const EnvConfig& cfg, uint64_t seed)
    : cfg_(cfg), carts_(cfg.carts), rng_(seed) {
  cfg_.validate();
  if (carts_ < 1)
    throw std::invalid_argument("carterpillar: carts must be >= 1");
  state_.resize(static_cast<size_t>(4) * carts_);
  reset();
}

std::vector<double> CarterpillarEnv::reset() {
  for (double& v : state_) v = rng_.uniform(-0.05, 0.05);
  steps_ = 0;
  done_ = false;
  return observation();
}

std::vector<double> CarterpillarEnv::observation() const {
  return std::vector<double>(state_.begin(), state_.end());
}

void CarterpillarEnv::set_state(std::span<const double> s) {
  if (s.size() != state_.size())
    throw std::invalid_argument("set_state: wrong state length");
  std::copy(s.begin(), s.end(), state_.begin());
  done_ = false;
}

StepResult CarterpillarEnv::step(int action) {
  if (action < 0 || action >= 2 * carts_)
    throw std::invalid_argument("carterpillar: action out of range");
  if (done_) throw std::logic_error("carterpillar: step after episode end");

  std::vector<double> positions(carts_), velocities(carts_);
  for (int i = 0; i < carts_; ++i) {
    positions[i] = state_[4 * i + 0];
    velocities[i] = state_[4 * i + 1];
  }
  std::vector<double> forces(carts_, 0.0);
  if (carts_ > 1)
    coupling_forces(positions, velocities, cfg_.spring_k, cfg_.damper_b,
                    forces);

  const int pushed = action / 2;
  forces[pushed] += (action % 2 == 1) ? cfg_.force_mag : -cfg_.force_mag;

  bool out_of_bounds = false;
  for (int i = 0; i < carts_; ++i) {
    CartPoleState s{state_[4 * i + 0], state_[4 * i + 1], state_[4 * i + 2],
                    state_[4 * i + 3]};
    s = cartpole_integrate(s, forces[i], cfg_);
    state_[4 * i + 0] = s.x;
    state_[4 * i + 1] = s.x_dot;
    state_[4 * i + 2] = s.theta;
    state_[4 * i + 3] = s.theta_dot;
    out_of_bounds = out_of_bounds || std::abs(s.x) > cfg_.position_limit ||
                    std::abs(s.theta) > cfg_.angle_limit;
  }
  steps_ += 1;

  StepResult r;
  r.observation = observation();
  r.reward = 1.0;
  r.terminated = out_of_bounds;
  r.truncated = steps_ >= cfg_.max_episode_steps;
  done_ = r.terminated || r.truncated;
  return r;
}

std::unique_ptr<Env> make_env(const EnvConfig& cfg, uint64_t seed) {
  if (cfg.kind == EnvKind::CartPole)
    return std::make_unique<CartPoleEnv>(cfg, seed);
  return std::make_unique<CarterpillarEnv>(cfg, seed);
}

VecEnv::VecEnv(const EnvConfig& cfg, int n_envs, uint64_t seed) {
  if (n_envs < 1) throw std::invalid_argument("VecEnv: n_envs must be >= 1");
  envs_.reserve(n_envs);
  observations_.reserve(n_envs);
  for (int i = 0; i < n_envs; ++i) {
    envs_.push_back(make_env(cfg, slot_seed(seed, i)));
    observations_.push_back(envs_.back()->observation());
  }
  episode_return_.assign(n_envs, 0.0);
}

std::vector<StepResult> VecEnv::step(std::span<const int> actions) {
  if (actions.size() != envs_.size())
    throw std::invalid_argument("VecEnv: one action per instance required");
  std::vector<StepResult> results;
  results.reserve(envs_.size());
  for (size_t i = 0; i < envs_.size(); ++i) {
    StepResult r = envs_[i]->step(actions[i]);
    episode_return_[i] += r.reward;
    if (r.terminated || r.truncated) {
      completed_returns_.push_back(episode_return_[i]);
      episode_return_[i] = 0.0;
      r.final_observation = std::move(r.observation);
      r.observation = envs_[i]->reset();
    }
    observations_[i] = r.observation;
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<double> VecEnv::drain_completed_returns() {
  std::vector<double> out = std::move(completed_returns_);
  completed_returns_.clear();
  return out;
}

}  // namespace cdpo::env
