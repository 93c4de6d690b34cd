#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cdpo::nn {

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;
inline constexpr int kDefaultHidden = 64;

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // row-major, out x in
  std::vector<double> b;  // out
};

// Actor-critic MLP weights: two separate tanh trunks, a policy head emitting
// one logit per action and a scalar value head. Shapes are fixed at init.
struct ParamSet {
  int obs_dim = 0;
  int action_count = 0;
  int hidden = kDefaultHidden;
  std::vector<DenseLayer> policy;  // trunk 0, trunk 1, head
  std::vector<DenseLayer> value;   // trunk 0, trunk 1, head
};

// Same shape as ParamSet, entries are d(objective)/d(param).
struct GradSet {
  int obs_dim = 0;
  int action_count = 0;
  int hidden = 0;
  std::vector<DenseLayer> policy;
  std::vector<DenseLayer> value;

  void set_zero();
};

struct OptimizerState {
  GradSet m;  // first moment
  GradSet v;  // second moment
  long step_count = 0;
};

// Activations recorded by one forward pass, consumed by backward().
struct Tape {
  std::vector<double> obs;
  std::vector<double> policy_h1, policy_h2, logits;
  std::vector<double> value_h1, value_h2;
  double value = 0.0;
};

// Orthogonal-init network: gain sqrt(2) on hidden layers, 0.01 on the policy
// head, 1.0 on the value head, zero biases. Deterministic given seed.
// Rejects action_count < 2 and obs_dim < 1.
ParamSet init_params(int obs_dim, int action_count, uint64_t seed,
                     int hidden = kDefaultHidden);

void forward(const ParamSet& params, std::span<const double> obs, Tape& tape);

struct ForwardOut {
  std::vector<double> logits;
  double value = 0.0;
};
ForwardOut forward(const ParamSet& params, std::span<const double> obs);

// Numerically stable softmax (max-subtraction).
void softmax(std::span<const double> logits, std::span<double> probs);
std::vector<double> softmax(std::span<const double> logits);

// Accumulates exact reverse-mode gradients of a scalar objective whose
// upstream derivatives w.r.t. the recorded logits and value are given.
// A tape that does not match the params' shapes is rejected.
void backward(const ParamSet& params, const Tape& tape,
              std::span<const double> dlogits, double dvalue, GradSet& grads);

GradSet zeros_like(const ParamSet& params);
OptimizerState make_optimizer_state(const ParamSet& params);

double global_norm(const GradSet& grads);
bool all_finite(const ParamSet& params);
bool all_finite(const GradSet& grads);
size_t param_count(const ParamSet& params);

// Gradient-ascent Adam step: grads are rescaled so their global L2 norm is at
// most max_norm, then the bias-corrected moment update is applied with
// beta1/beta2/epsilon above. Throws on non-finite gradients.
void optimizer_step(ParamSet& params, const GradSet& grads,
                    OptimizerState& state, double lr, double max_norm);

// Flat views over every parameter in a fixed traversal order
// (policy layers then value layers; within a layer, weights then bias).
std::vector<double*> param_pointers(ParamSet& params);
std::vector<const double*> param_pointers(const ParamSet& params);
std::vector<double*> param_pointers(GradSet& grads);
std::vector<const double*> param_pointers(const GradSet& grads);

}  // namespace cdpo::nn
