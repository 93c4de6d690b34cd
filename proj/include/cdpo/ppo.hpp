#pragma once

#include <span>
#include <utility>

#include "cdpo/nn.hpp"
#include "cdpo/regularizers.hpp"
#include "cdpo/rng.hpp"
#include "cdpo/rollout.hpp"

namespace cdpo::rl {

struct LossConfig {
  double clip_range = 0.2;
  double c_vf = 0.5;
  double reg_coef = 0.0;
  reg::RegularizerKind regularizer = reg::RegularizerKind::None;

  void validate() const;  // clip_range in (0,1), coefficients >= 0
};

struct UpdateConfig {
  LossConfig loss;
  int n_epochs = 20;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double max_grad_norm = 0.5;
};

// Mean diagnostics over the minibatch passes of one update. Entropy,
// disequilibrium and complexity are logged regardless of the active
// regularizer kind.
struct UpdateMetrics {
  double clip_objective = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double disequilibrium = 0.0;
  double complexity = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  int passes = 0;
};

// min(ratio * adv, clip(ratio, 1-eps, 1+eps) * adv)
double clip_objective(double ratio, double adv, double eps);

// Unclipped mean squared error.
double value_loss(std::span<const double> v_pred, std::span<const double> v_targ);

// Maximized objective: mean clip term - c_vf * value loss + reg_coef * mean
// regularizer, with the regularizer evaluated under the current policy at the
// stored states. Throws if the result is non-finite.
std::pair<double, UpdateMetrics> total_objective(const Minibatch& mb,
                                                 const nn::ParamSet& params,
                                                 const LossConfig& cfg);

// Same objective; additionally accumulates its parameter gradient.
std::pair<double, UpdateMetrics> objective_with_grad(const Minibatch& mb,
                                                     const nn::ParamSet& params,
                                                     const LossConfig& cfg,
                                                     nn::GradSet& grads);

// n_epochs passes over freshly shuffled minibatches, one clipped ascent step
// per minibatch. Old log-probs stay fixed at their collection-time values.
UpdateMetrics update(nn::ParamSet& params, nn::OptimizerState& opt_state,
                     const RolloutBuffer& buffer, const UpdateConfig& cfg,
                     Rng& rng);

}  // namespace cdpo::rl
