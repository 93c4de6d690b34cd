#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "cdpo/envs.hpp"
#include "cdpo/rng.hpp"

using namespace cdpo;

namespace {

env::EnvConfig cartpole_config() {
  env::EnvConfig cfg;
  cfg.kind = env::EnvKind::CartPole;
  return cfg;
}

env::EnvConfig carterpillar_config(int carts) {
  env::EnvConfig cfg;
  cfg.kind = env::EnvKind::Carterpillar;
  cfg.carts = carts;
  return cfg;
}

}  // namespace

TEST_CASE("reset determinism and observation lengths") {
  env::CartPoleEnv a(cartpole_config(), 11);
  env::CartPoleEnv b(cartpole_config(), 11);
  CHECK(a.observation() == b.observation());
  CHECK(a.observation().size() == 4);
  for (double v : a.observation()) {
    CHECK(v >= -0.05);
    CHECK(v <= 0.05);
  }

  env::CarterpillarEnv c(carterpillar_config(4), 3);
  CHECK(c.observation().size() == 16);
  env::CarterpillarEnv d(carterpillar_config(4), 3);
  CHECK(c.observation() == d.observation());
}

TEST_CASE("cartpole push direction and mirror symmetry") {
  env::EnvConfig cfg = cartpole_config();
  env::CartPoleEnv env(cfg, 0);

  const env::CartPoleState zero{};
  const auto pushed = env::cartpole_integrate(zero, cfg.force_mag, cfg);
  CHECK(pushed.x_dot > 0.0);
  const auto mirrored = env::cartpole_integrate(zero, -cfg.force_mag, cfg);
  CHECK(std::abs(mirrored.x + pushed.x) < 1e-15);
  CHECK(std::abs(mirrored.x_dot + pushed.x_dot) < 1e-15);
  CHECK(std::abs(mirrored.theta + pushed.theta) < 1e-15);
  CHECK(std::abs(mirrored.theta_dot + pushed.theta_dot) < 1e-15);

  Rng rng(20);
  for (int i = 0; i < 200; ++i) {
    env::CartPoleState s{rng.uniform(-1, 1), rng.uniform(-1, 1),
                         rng.uniform(-0.2, 0.2), rng.uniform(-1, 1)};
    env::CartPoleState neg{-s.x, -s.x_dot, -s.theta, -s.theta_dot};
    const double f = rng.uniform(0, 10);
    const auto fwd = env::cartpole_integrate(s, f, cfg);
    const auto rev = env::cartpole_integrate(neg, -f, cfg);
    CHECK(std::abs(fwd.x + rev.x) < 1e-12);
    CHECK(std::abs(fwd.x_dot + rev.x_dot) < 1e-12);
    CHECK(std::abs(fwd.theta + rev.theta) < 1e-12);
    CHECK(std::abs(fwd.theta_dot + rev.theta_dot) < 1e-12);
  }
}

TEST_CASE("cartpole terminates past the angle bound") {
  env::CartPoleEnv e(cartpole_config(), 0);
  e.set_state(env::CartPoleState{0.0, 0.0, 0.25, 0.0});  // 0.25 rad > 12 deg
  const auto r = e.step(0);
  CHECK(r.terminated);
  CHECK(r.reward == 1.0);
  CHECK_THROWS_AS(e.step(1), std::logic_error);

  // driven failure terminates too
  env::CartPoleEnv f(cartpole_config(), 0);
  env::StepResult rr;
  int steps = 0;
  do {
    rr = f.step(1);
    steps += 1;
  } while (!rr.terminated && !rr.truncated && steps < 500);
  CHECK(rr.terminated);
  const double theta = rr.observation[2];
  const double x = rr.observation[0];
  CHECK((std::abs(theta) > 12.0 * kPi / 180.0 || std::abs(x) > 2.4));
}

TEST_CASE("cartpole truncates at the step limit with reward 500") {
  env::CartPoleEnv e(cartpole_config(), 4);
  double total = 0.0;
  env::StepResult r;
  for (int t = 0; t < 500; ++t) {
    // simple stabilizing feedback keeps the pole up indefinitely
    const auto obs = e.observation();
    const int action = obs[2] + obs[3] > 0.0 ? 1 : 0;
    r = e.step(action);
    total += r.reward;
    REQUIRE_FALSE(r.terminated);
  }
  CHECK(r.truncated);
  CHECK(total == 500.0);
}

TEST_CASE("cartpole rejects bad actions") {
  env::CartPoleEnv e(cartpole_config(), 0);
  CHECK_THROWS_AS(e.step(2), std::invalid_argument);
  CHECK_THROWS_AS(e.step(-1), std::invalid_argument);
}

TEST_CASE("coupling forces") {
  // equilibrium: identical positions and velocities
  const std::vector<double> same_x(5, 1.3), same_v(5, -0.7);
  for (double f : env::coupling_forces(same_x, same_v, 1.0, 1.0))
    CHECK(f == 0.0);

  // two carts, unit spring: Hooke arithmetic
  const auto f2 = env::coupling_forces(std::vector<double>{-1.0, 1.0},
                                       std::vector<double>{0.0, 0.0}, 1.0, 1.0);
  CHECK(f2[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f2[1] == doctest::Approx(-2.0).epsilon(1e-15));

  // Newton's third law: totals cancel
  Rng rng(30);
  for (int trial = 0; trial < 200; ++trial) {
    const int c = 2 + rng.uniform_int(10);
    std::vector<double> x(c), v(c);
    for (int i = 0; i < c; ++i) {
      x[i] = rng.uniform(-2.4, 2.4);
      v[i] = rng.uniform(-3.0, 3.0);
    }
    const auto f = env::coupling_forces(x, v, 1.0, 1.0);
    double total = 0.0;
    for (double fi : f) total += fi;
    CHECK(std::abs(total) < 1e-12);
  }
}

TEST_CASE("carterpillar action space and rejection") {
  env::CarterpillarEnv e(carterpillar_config(4), 0);
  CHECK(e.action_count() == 8);
  CHECK_THROWS_AS(e.step(8), std::invalid_argument);
  CHECK_THROWS_AS(e.step(-1), std::invalid_argument);
}

TEST_CASE("carterpillar mirror symmetry") {
  const env::EnvConfig cfg = carterpillar_config(3);
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    // integrate a random state and its mirror image one step and compare
    std::vector<double> x(3), v(3), th(3), w(3);
    for (int i = 0; i < 3; ++i) {
      x[i] = rng.uniform(-1, 1);
      v[i] = rng.uniform(-1, 1);
      th[i] = rng.uniform(-0.2, 0.2);
      w[i] = rng.uniform(-1, 1);
    }
    const int action = rng.uniform_int(6);
    const int mirrored_action = action ^ 1;  // swap left/right, same cart

    auto step_all = [&](double sign, int act) {
      std::vector<double> pos(3), vel(3);
      for (int i = 0; i < 3; ++i) {
        pos[i] = sign * x[i];
        vel[i] = sign * v[i];
      }
      auto forces = env::coupling_forces(pos, vel, cfg.spring_k, cfg.damper_b);
      forces[act / 2] += (act % 2 == 1) ? cfg.force_mag : -cfg.force_mag;
      std::vector<double> out;
      for (int i = 0; i < 3; ++i) {
        env::CartPoleState s{sign * x[i], sign * v[i], sign * th[i],
                             sign * w[i]};
        const auto next = env::cartpole_integrate(s, forces[i], cfg);
        out.insert(out.end(), {next.x, next.x_dot, next.theta, next.theta_dot});
      }
      return out;
    };
    const auto fwd = step_all(1.0, action);
    const auto rev = step_all(-1.0, mirrored_action);
    for (size_t k = 0; k < fwd.size(); ++k)
      CHECK(std::abs(fwd[k] + rev[k]) < 1e-12);
  }
}

TEST_CASE("pushing one of two identical carts desynchronizes them") {
  env::EnvConfig cfg = carterpillar_config(2);
  env::CarterpillarEnv e(cfg, 7);
  // both carts in the same state: coupling is zero, so the unpushed cart
  // sees no force this step and the two carts differ afterwards
  const std::vector<double> shared{0.01, -0.02, 0.03, 0.005};
  std::vector<double> state(shared);
  state.insert(state.end(), shared.begin(), shared.end());
  e.set_state(state);

  const auto forces = env::coupling_forces(
      std::vector<double>{shared[0], shared[0]},
      std::vector<double>{shared[1], shared[1]}, cfg.spring_k, cfg.damper_b);
  CHECK(forces[0] == 0.0);
  CHECK(forces[1] == 0.0);

  const auto r = e.step(1);  // push cart 0 right
  const double x0 = r.observation[0], x1 = r.observation[4];
  const double v0 = r.observation[1], v1 = r.observation[5];
  CHECK(x0 != x1);
  CHECK(v0 > v1);
  // cart 1 evolved exactly as an unforced cart-pole this step
  const auto passive = env::cartpole_integrate(
      env::CartPoleState{shared[0], shared[1], shared[2], shared[3]}, 0.0, cfg);
  CHECK(r.observation[4] == passive.x);
  CHECK(r.observation[5] == passive.x_dot);
  CHECK(r.observation[6] == passive.theta);
  CHECK(r.observation[7] == passive.theta_dot);
}

TEST_CASE("carterpillar terminates when any cart violates a bound") {
  env::EnvConfig cfg = carterpillar_config(2);
  env::CarterpillarEnv e(cfg, 1);
  env::StepResult r;
  int steps = 0;
  do {
    r = e.step(1);  // push cart 0 right forever
    steps += 1;
  } while (!r.terminated && !r.truncated && steps < 500);
  CHECK(r.terminated);
  bool violated = false;
  for (int i = 0; i < 2; ++i) {
    if (std::abs(r.observation[4 * i]) > cfg.position_limit ||
        std::abs(r.observation[4 * i + 2]) > cfg.angle_limit)
      violated = true;
  }
  CHECK(violated);
}

TEST_CASE("single-cart carterpillar with idle coupling equals cartpole") {
  env::EnvConfig cp = cartpole_config();
  env::EnvConfig ct = carterpillar_config(1);
  env::CartPoleEnv a(cp, 99);
  env::CarterpillarEnv b(ct, 99);
  CHECK(a.observation() == b.observation());

  Rng rng(99);
  int transitions = 0;
  while (transitions < 1000) {
    const int action = rng.uniform_int(2);
    const auto ra = a.step(action);
    const auto rb = b.step(action);
    transitions += 1;
    REQUIRE(ra.observation == rb.observation);  // exact match
    REQUIRE(ra.reward == rb.reward);
    REQUIRE(ra.terminated == rb.terminated);
    REQUIRE(ra.truncated == rb.truncated);
    if (ra.terminated || ra.truncated) {
      a.reset();
      b.reset();
    }
  }
}

TEST_CASE("states stay finite under prolonged random stepping") {
  env::CartPoleEnv e(cartpole_config(), 5);
  Rng rng(50);
  for (long t = 0; t < 1000000; ++t) {
    const auto r = e.step(rng.uniform_int(2));
    for (double v : r.observation) REQUIRE(std::isfinite(v));
    if (r.terminated || r.truncated) e.reset();
  }

  env::CarterpillarEnv c(carterpillar_config(3), 5);
  for (long t = 0; t < 100000; ++t) {
    const auto r = c.step(rng.uniform_int(6));
    for (double v : r.observation) REQUIRE(std::isfinite(v));
    if (r.terminated || r.truncated) c.reset();
  }
}

TEST_CASE("vectorized stepping with auto-reset") {
  env::VecEnv venv(cartpole_config(), 8, 123);
  CHECK(venv.n_envs() == 8);
  CHECK(venv.obs_dim() == 4);
  CHECK(venv.action_count() == 2);

  // ordinary transitions
  std::vector<int> actions(8, 1);
  auto results = venv.step(actions);
  CHECK(results.size() == 8);
  for (const auto& r : results) {
    CHECK(r.reward == 1.0);
    CHECK_FALSE(r.terminated);
    CHECK(r.final_observation.empty());
  }

  // drive everything to failure: auto-reset must deliver fresh observations
  bool saw_reset = false;
  for (int t = 0; t < 200 && !saw_reset; ++t) {
    results = venv.step(actions);
    for (const auto& r : results) {
      if (r.terminated) {
        saw_reset = true;
        CHECK_FALSE(r.final_observation.empty());
        for (double v : r.observation) {
          CHECK(v >= -0.05);
          CHECK(v <= 0.05);
        }
      }
    }
  }
  CHECK(saw_reset);
  CHECK_FALSE(venv.drain_completed_returns().empty());
}

TEST_CASE("vectorized trajectories are reproducible") {
  env::VecEnv a(carterpillar_config(2), 4, 77);
  env::VecEnv b(carterpillar_config(2), 4, 77);
  Rng ra(5), rb(5);
  for (int t = 0; t < 300; ++t) {
    std::vector<int> actions(4);
    for (int& act : actions) act = ra.uniform_int(4);
    std::vector<int> actions_b(4);
    for (int& act : actions_b) act = rb.uniform_int(4);
    const auto res_a = a.step(actions);
    const auto res_b = b.step(actions_b);
    for (int e = 0; e < 4; ++e) {
      REQUIRE(res_a[e].observation == res_b[e].observation);
      REQUIRE(res_a[e].terminated == res_b[e].terminated);
    }
  }
}

TEST_CASE("config validation") {
  env::EnvConfig cfg = cartpole_config();
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = carterpillar_config(0);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
