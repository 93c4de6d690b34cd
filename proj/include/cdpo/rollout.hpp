#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdpo/envs.hpp"
#include "cdpo/nn.hpp"
#include "cdpo/rng.hpp"

namespace cdpo::rl {

// Fixed-size on-policy store, flat index = step * n_envs + env.
struct RolloutBuffer {
  int n_steps = 0;
  int n_envs = 0;
  int obs_dim = 0;
  int action_count = 0;

  std::vector<double> obs;          // [size * obs_dim]
  std::vector<int> actions;         // [size]
  std::vector<double> rewards;      // [size]
  std::vector<uint8_t> terminated;  // [size]
  std::vector<uint8_t> truncated;   // [size]
  std::vector<double> values;       // V(s_t) at collection time
  std::vector<double> log_probs;    // log pi_old(a_t|s_t)
  // V of the true post-step state, recorded when a step truncates; GAE
  // bootstraps through it instead of the auto-reset observation.
  std::vector<double> truncation_values;

  std::vector<double> advantages;
  std::vector<double> value_targets;
  bool gae_done = false;

  int size() const { return n_steps * n_envs; }
  std::span<const double> observation(int flat_index) const {
    return {obs.data() + static_cast<size_t>(flat_index) * obs_dim,
            static_cast<size_t>(obs_dim)};
  }

  void resize(int n_steps, int n_envs, int obs_dim, int action_count);
};

// Samples actions from softmax(policy logits), records values and log-probs
// under the sampling policy, and steps the vectorized environment n_steps
// times. Deterministic given the rng state.
RolloutBuffer collect(const nn::ParamSet& policy, env::VecEnv& venv,
                      int n_steps, Rng& rng);

// V(s) of the environments' current observations (the states following the
// final stored step).
std::vector<double> last_values(const nn::ParamSet& policy,
                                const env::VecEnv& venv);

// delta_t = r_t + gamma * V(s_{t+1}) * (1 - terminated_t) - V(s_t)
// A_t = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// V^targ_t = A_t + V(s_t)
// Truncated steps bootstrap through the recorded truncation value; terminated
// steps zero the bootstrap.
void compute_gae(RolloutBuffer& buffer, std::span<const double> last_values,
                 double gamma, double lam);

struct Minibatch {
  const RolloutBuffer* buffer = nullptr;
  std::vector<int> indices;               // flat buffer indices
  std::vector<double> norm_advantages;    // advantages normalized per slice
};

// Random permutation split into size-B slices; each slice's advantages are
// normalized with that slice's mean and std (+1e-8 guard). batch_size must
// divide the buffer size.
std::vector<Minibatch> minibatches(const RolloutBuffer& buffer, int batch_size,
                                   Rng& rng);

}  // namespace cdpo::rl
