#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cdpo/rng.hpp"

namespace cdpo::env {

enum class EnvKind { CartPole, Carterpillar };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

struct EnvConfig {
  EnvKind kind = EnvKind::CartPole;
  int carts = 2;  // Carterpillar only
  double gravity = 9.81;
  double spring_k = 1.0;
  double damper_b = 1.0;
  int max_episode_steps = 500;
  double dt = 0.02;
  double force_mag = 10.0;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double pole_half_length = 0.5;
  double position_limit = 2.4;
  double angle_limit = 12.0 * 3.14159265358979323846 / 180.0;  // radians

  void validate() const;  // throws std::invalid_argument
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminated = false;  // physics bound violated
  bool truncated = false;   // step limit reached
  // Set by the vectorized wrapper on auto-reset: the true post-step
  // observation of the episode that just ended.
  std::vector<double> final_observation;
};

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
};

// Accelerations of one cart-pole under a net horizontal force on the cart
// (classic formulation, pole half-length in config).
void cartpole_accel(double theta, double theta_dot, double force,
                    const EnvConfig& cfg, double& x_acc, double& theta_acc);

// One semi-implicit Euler step of the classic dynamics.
CartPoleState cartpole_integrate(const CartPoleState& s, double force,
                                 const EnvConfig& cfg);

// Net spring+damper force on every cart from all other carts:
// F_i = sum_{j != i} k*(x_j - x_i) + b*(v_j - v_i). Zero rest length, so the
// pairwise contributions cancel exactly and the total force sums to zero.
void coupling_forces(std::span<const double> positions,
                     std::span<const double> velocities, double k, double b,
                     std::span<double> forces);
std::vector<double> coupling_forces(std::span<const double> positions,
                                    std::span<const double> velocities,
                                    double k, double b);

class Env {
 public:
  virtual ~Env() = default;
  virtual std::vector<double> reset() = 0;
  virtual StepResult step(int action) = 0;
  virtual int obs_dim() const = 0;
  virtual int action_count() const = 0;
  virtual std::vector<double> observation() const = 0;
};

class CartPoleEnv final : public Env {
 public:
  CartPoleEnv(const EnvConfig& cfg, uint64_t seed);
  std::vector<double> reset() override;
  StepResult step(int action) override;  // action 0: push left, 1: push right
  int obs_dim() const override { return 4; }
  int action_count() const override { return 2; }
  std::vector<double> observation() const override;
  const CartPoleState& state() const { return state_; }
  void set_state(const CartPoleState& s);  // testing/debug
  int steps() const { return steps_; }

 private:
  EnvConfig cfg_;
  Rng rng_;
  CartPoleState state_;
  int steps_ = 0;
  bool done_ = true;
};

// C coupled carts, each carrying its own pole. Action 2i pushes cart i left,
// 2i+1 pushes it right; only that cart is actuated, all carts feel the
// pairwise spring/damper coupling. The episode ends when any cart leaves the
// position bound or any pole exceeds the angle bound.
class CarterpillarEnv final : public Env {
 public:
  CarterpillarEnv(const EnvConfig& cfg, uint64_t seed);
  std::vector<double> reset() override;
  StepResult step(int action) override;
  int obs_dim() const override { return 4 * carts_; }
  int action_count() const override { return 2 * carts_; }
  std::vector<double> observation() const override;
  std::span<const double> state() const { return state_; }
  void set_state(std::span<const double> s);  // testing/debug
  int carts() const { return carts_; }

 private:
  EnvConfig cfg_;
  int carts_;
  Rng rng_;
  std::vector<double> state_;  // per cart: x, x_dot, theta, theta_dot
  int steps_ = 0;
  bool done_ = true;
};

std::unique_ptr<Env> make_env(const EnvConfig& cfg, uint64_t seed);

// Synchronous vectorized wrapper with auto-reset: slots whose episode ends
// are reset immediately; the returned observation for such slots is the fresh
// reset observation while reward/flags describe the ended step.
class VecEnv {
 public:
  VecEnv(const EnvConfig& cfg, int n_envs, uint64_t seed);

  std::vector<StepResult> step(std::span<const int> actions);

  int n_envs() const { return static_cast<int>(envs_.size()); }
  int obs_dim() const { return envs_.front()->obs_dim(); }
  int action_count() const { return envs_.front()->action_count(); }
  const std::vector<std::vector<double>>& observations() const {
    return observations_;
  }

  // Returns of episodes completed since the last drain, in completion order.
  std::vector<double> drain_completed_returns();

 private:
  std::vector<std::unique_ptr<Env>> envs_;
  std::vector<std::vector<double>> observations_;
  std::vector<double> episode_return_;
  std::vector<double> completed_returns_;
};

}  // namespace cdpo::env
