#include "cdpo/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cdpo::rl {

void LossConfig::validate() const {
  if (!(clip_range > 0.0 && clip_range < 1.0))
    throw std::invalid_argument("clip_range must be in (0, 1)");
  if (c_vf < 0.0) throw std::invalid_argument("c_vf must be >= 0");
  if (reg_coef < 0.0) throw std::invalid_argument("reg_coef must be >= 0");
}

double clip_objective(double ratio, double adv, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * adv, clipped * adv);
}

double value_loss(std::span<const double> v_pred,
                  std::span<const double> v_targ) {
  if (v_pred.size() != v_targ.size())
    throw std::invalid_argument("value_loss: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < v_pred.size(); ++i) {
    const double d = v_pred[i] - v_targ[i];
    acc += d * d;
  }
  return acc / static_cast<double>(v_pred.size());
}

namespace {

// One pass over a minibatch: objective value, diagnostics and (optionally)
// the accumulated parameter gradient of the maximized objective.
std::pair<double, UpdateMetrics> minibatch_pass(const Minibatch& mb,
                                                const nn::ParamSet& params,
                                                const LossConfig& cfg,
                                                nn::GradSet* grads) {
  cfg.validate();
  const RolloutBuffer& buffer = *mb.buffer;
  const int b = static_cast<int>(mb.indices.size());
  const int n_actions = params.action_count;
  const double inv_b = 1.0 / static_cast<double>(b);

  nn::Tape tape;
  std::vector<double> probs(n_actions), bracket(n_actions),
      dlogits(n_actions);

  double clip_sum = 0.0, vloss_sum = 0.0, reg_sum = 0.0;
  double ent_sum = 0.0, diseq_sum = 0.0, comp_sum = 0.0;
  double kl_sum = 0.0;
  int clipped_count = 0;

  for (int i = 0; i < b; ++i) {
    const int idx = mb.indices[i];
    nn::forward(params, buffer.observation(idx), tape);
    nn::softmax(tape.logits, probs);

    const int a = buffer.actions[idx];
    const double adv = mb.norm_advantages[i];
    const double logp_new = std::log(std::max(probs[a], reg::kProbFloor));
    const double log_ratio = logp_new - buffer.log_probs[idx];
    const double ratio = std::exp(log_ratio);

    const double unclipped = ratio * adv;
    const double clipped =
        std::clamp(ratio, 1.0 - cfg.clip_range, 1.0 + cfg.clip_range) * adv;
    clip_sum += std::min(unclipped, clipped);
    if (std::abs(ratio - 1.0) > cfg.clip_range) clipped_count += 1;
    kl_sum += (ratio - 1.0) - log_ratio;

    const double v_diff = tape.value - buffer.value_targets[idx];
    vloss_sum += v_diff * v_diff;

    const double s = reg::entropy(probs);
    const double d = reg::disequilibrium(probs);
    ent_sum += s;
    diseq_sum += d;
    comp_sum += s * d;
    reg_sum += cfg.regularizer == reg::RegularizerKind::Entropy ? s
               : cfg.regularizer == reg::RegularizerKind::Complexity ? s * d
                                                                     : 0.0;

    if (grads != nullptr) {
      // d(clip term)/d(logit_k): active only when the unclipped branch is
      // the min; gradient through log pi(a) is (e_a - p).
      const double dclip = unclipped <= clipped ? adv * ratio * inv_b : 0.0;
      for (int k = 0; k < n_actions; ++k) dlogits[k] = -dclip * probs[k];
      dlogits[a] += dclip;

      if (cfg.regularizer != reg::RegularizerKind::None) {
        reg::regularizer_grad(cfg.regularizer, probs, bracket);
        double dot = 0.0;
        for (int k = 0; k < n_actions; ++k) dot += bracket[k] * probs[k];
        const double scale = cfg.reg_coef * inv_b;
        for (int k = 0; k < n_actions; ++k)
          dlogits[k] += scale * probs[k] * (bracket[k] - dot);
      }

      const double dvalue = -cfg.c_vf * 2.0 * v_diff * inv_b;
      nn::backward(params, tape, dlogits, dvalue, *grads);
    }
  }

  const double objective = clip_sum * inv_b - cfg.c_vf * vloss_sum * inv_b +
                           cfg.reg_coef * reg_sum * inv_b;
  if (!std::isfinite(objective)) {
    std::ostringstream msg;
    msg << "total_objective: non-finite objective (clip=" << clip_sum * inv_b
        << ", value=" << vloss_sum * inv_b << ", reg=" << reg_sum * inv_b
        << ")";
    throw std::runtime_error(msg.str());
  }

  UpdateMetrics metrics;
  metrics.clip_objective = clip_sum * inv_b;
  metrics.value_loss = vloss_sum * inv_b;
  metrics.entropy = ent_sum * inv_b;
  metrics.disequilibrium = diseq_sum * inv_b;
  metrics.complexity = comp_sum * inv_b;
  metrics.clip_fraction = static_cast<double>(clipped_count) * inv_b;
  metrics.approx_kl = kl_sum * inv_b;
  metrics.passes = 1;
  return {objective, metrics};
}

void accumulate(UpdateMetrics& total, const UpdateMetrics& one) {
  total.clip_objective += one.clip_objective;
  total.value_loss += one.value_loss;
  total.entropy += one.entropy;
  total.disequilibrium += one.disequilibrium;
  total.complexity += one.complexity;
  total.clip_fraction += one.clip_fraction;
  total.approx_kl += one.approx_kl;
  total.passes += 1;
}

void finalize(UpdateMetrics& total) {
  if (total.passes == 0) return;
  const double inv = 1.0 / static_cast<double>(total.passes);
  total.clip_objective *= inv;
  total.value_loss *= inv;
  total.entropy *= inv;
  total.disequilibrium *= inv;
  total.complexity *= inv;
  total.clip_fraction *= inv;
  total.approx_kl *= inv;
}

}  // namespace

std::pair<double, UpdateMetrics> total_objective(const Minibatch& mb,
                                                 const nn::ParamSet& params,
                                                 const LossConfig& cfg) {
  return minibatch_pass(mb, params, cfg, nullptr);
}

std::pair<double, UpdateMetrics> objective_with_grad(const Minibatch& mb,
                                                     const nn::ParamSet& params,
                                                     const LossConfig& cfg,
                                                     nn::GradSet& grads) {
  return minibatch_pass(mb, params, cfg, &grads);
}

UpdateMetrics update(nn::ParamSet& params, nn::OptimizerState& opt_state,
                     const RolloutBuffer& buffer, const UpdateConfig& cfg,
                     Rng& rng) {
  if (!buffer.gae_done)
    throw std::logic_error("update: buffer advantages not computed");
  if (cfg.n_epochs < 0)
    throw std::invalid_argument("update: n_epochs must be >= 0");
  cfg.loss.validate();

  UpdateMetrics total;
  nn::GradSet grads = nn::zeros_like(params);
  for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
    for (const Minibatch& mb : minibatches(buffer, cfg.batch_size, rng)) {
      grads.set_zero();
      auto [objective, metrics] =
          objective_with_grad(mb, params, cfg.loss, grads);
      (void)objective;
      nn::optimizer_step(params, grads, opt_state, cfg.learning_rate,
                         cfg.max_grad_norm);
      accumulate(total, metrics);
    }
  }
  finalize(total);
  return total;
}

}  // namespace cdpo::rl
