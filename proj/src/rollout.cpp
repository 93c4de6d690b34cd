#include "cdpo/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cdpo/regularizers.hpp"

namespace cdpo::rl {

void RolloutBuffer::resize(int steps, int envs, int od, int ac) {
  n_steps = steps;
  n_envs = envs;
  obs_dim = od;
  action_count = ac;
  const size_t n = static_cast<size_t>(size());
  obs.assign(n * obs_dim, 0.0);
  actions.assign(n, 0);
  rewards.assign(n, 0.0);
  terminated.assign(n, 0);
  truncated.assign(n, 0);
  values.assign(n, 0.0);
  log_probs.assign(n, 0.0);
  truncation_values.assign(n, 0.0);
  advantages.assign(n, 0.0);
  value_targets.assign(n, 0.0);
  gae_done = false;
}

RolloutBuffer collect(const nn::ParamSet& policy, env::VecEnv& venv,
                      int n_steps, Rng& rng) {
  if (n_steps < 1) throw std::invalid_argument("collect: n_steps must be >= 1");
  RolloutBuffer buffer;
  buffer.resize(n_steps, venv.n_envs(), venv.obs_dim(), venv.action_count());

  nn::Tape tape;
  std::vector<double> probs(venv.action_count());
  std::vector<int> actions(venv.n_envs());

  for (int t = 0; t < n_steps; ++t) {
    for (int e = 0; e < venv.n_envs(); ++e) {
      const int idx = t * venv.n_envs() + e;
      const auto& o = venv.observations()[e];
      std::copy(o.begin(), o.end(),
                buffer.obs.begin() + static_cast<size_t>(idx) * buffer.obs_dim);
      nn::forward(policy, o, tape);
      nn::softmax(tape.logits, probs);
      const int a = rng.categorical(probs);
      actions[e] = a;
      buffer.actions[idx] = a;
      buffer.values[idx] = tape.value;
      buffer.log_probs[idx] =
          std::log(std::max(probs[a], reg::kProbFloor));
    }
    const auto results = venv.step(actions);
    for (int e = 0; e < venv.n_envs(); ++e) {
      const int idx = t * venv.n_envs() + e;
      const auto& r = results[e];
      buffer.rewards[idx] = r.reward;
      buffer.terminated[idx] = r.terminated ? 1 : 0;
      buffer.truncated[idx] = r.truncated ? 1 : 0;
      if (r.truncated && !r.terminated) {
        nn::forward(policy, r.final_observation, tape);
        buffer.truncation_values[idx] = tape.value;
      }
    }
  }
  return buffer;
}

std::vector<double> last_values(const nn::ParamSet& policy,
                                const env::VecEnv& venv) {
  std::vector<double> out(venv.n_envs());
  nn::Tape tape;
  for (int e = 0; e < venv.n_envs(); ++e) {
    nn::forward(policy, venv.observations()[e], tape);
    out[e] = tape.value;
  }
  return out;
}

void compute_gae(RolloutBuffer& buffer, std::span<const double> last_values,
                 double gamma, double lam) {
  if (last_values.size() != static_cast<size_t>(buffer.n_envs))
    throw std::invalid_argument("compute_gae: one last value per env required");
  for (int e = 0; e < buffer.n_envs; ++e) {
    double gae = 0.0;
    for (int t = buffer.n_steps - 1; t >= 0; --t) {
      const int idx = t * buffer.n_envs + e;
      const bool term = buffer.terminated[idx] != 0;
      const bool trunc = buffer.truncated[idx] != 0;
      double v_next;
      if (term) {
        v_next = 0.0;
      } else if (trunc) {
        v_next = buffer.truncation_values[idx];
      } else if (t == buffer.n_steps - 1) {
        v_next = last_values[e];
      } else {
        v_next = buffer.values[idx + buffer.n_envs];
      }
      const double delta =
          buffer.rewards[idx] + gamma * v_next - buffer.values[idx];
      const bool done = term || trunc;
      gae = delta + gamma * lam * (done ? 0.0 : gae);
      buffer.advantages[idx] = gae;
      buffer.value_targets[idx] = gae + buffer.values[idx];
    }
  }
  buffer.gae_done = true;
}

std::vector<Minibatch> minibatches(const RolloutBuffer& buffer, int batch_size,
                                   Rng& rng) {
  if (!buffer.gae_done)
    throw std::logic_error("minibatches: advantages not computed yet");
  if (batch_size < 1 || buffer.size() % batch_size != 0)
    throw std::invalid_argument(
        "minibatches: batch size must divide the buffer size");

  const std::vector<int> perm = rng.permutation(buffer.size());
  const int k = buffer.size() / batch_size;
  std::vector<Minibatch> out(k);
  for (int m = 0; m < k; ++m) {
    Minibatch& mb = out[m];
    mb.buffer = &buffer;
    mb.indices.assign(perm.begin() + static_cast<size_t>(m) * batch_size,
                      perm.begin() + static_cast<size_t>(m + 1) * batch_size);
    mb.norm_advantages.resize(batch_size);
    double mean = 0.0;
    for (int i : mb.indices) mean += buffer.advantages[i];
    mean /= batch_size;
    double var = 0.0;
    for (int i : mb.indices) {
      const double d = buffer.advantages[i] - mean;
      var += d * d;
    }
    const double std_dev =
        batch_size > 1 ? std::sqrt(var / (batch_size - 1)) : 0.0;
    for (int i = 0; i < batch_size; ++i)
      mb.norm_advantages[i] =
          (buffer.advantages[mb.indices[i]] - mean) / (std_dev + 1e-8);
  }
  return out;
}

}  // namespace cdpo::rl
