#include "cdpo/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "cdpo/rng.hpp"

namespace cdpo::nn {

namespace {

// w <- gain * Q where Q is drawn orthogonal (modified Gram-Schmidt on the
// tall orientation of a Gaussian matrix).
void orthogonal_init(std::vector<double>& w, int rows, int cols, double gain,
                     Rng& rng) {
  const int r = std::max(rows, cols);
  const int c = std::min(rows, cols);
  std::vector<double> g(static_cast<size_t>(r) * c);
  for (double& x : g) x = rng.normal();
  for (int j = 0; j < c; ++j) {
    for (int i = 0; i < j; ++i) {
      double dot = 0.0;
      for (int k = 0; k < r; ++k) dot += g[k * c + i] * g[k * c + j];
      for (int k = 0; k < r; ++k) g[k * c + j] -= dot * g[k * c + i];
    }
    double nrm = 0.0;
    for (int k = 0; k < r; ++k) nrm += g[k * c + j] * g[k * c + j];
    nrm = std::sqrt(nrm);
    for (int k = 0; k < r; ++k) g[k * c + j] /= nrm;
  }
  w.resize(static_cast<size_t>(rows) * cols);
  if (rows >= cols) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) w[i * cols + j] = gain * g[i * c + j];
  } else {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) w[i * cols + j] = gain * g[j * c + i];
  }
}

DenseLayer make_layer(int in, int out, double gain, Rng& rng) {
  DenseLayer layer;
  layer.in = in;
  layer.out = out;
  orthogonal_init(layer.w, out, in, gain, rng);
  layer.b.assign(out, 0.0);
  return layer;
}

void affine(const DenseLayer& layer, std::span<const double> x,
            std::span<double> y) {
  for (int i = 0; i < layer.out; ++i) {
    const double* row = layer.w.data() + static_cast<size_t>(i) * layer.in;
    double acc = layer.b[i];
    for (int j = 0; j < layer.in; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void tanh_inplace(std::span<double> x) {
  for (double& v : x) v = std::tanh(v);
}

// grads.w += d (x) x^T, grads.b += d; dx = W^T d (dx may be empty to skip)
void accumulate_layer(const DenseLayer& layer, std::span<const double> x,
                      std::span<const double> d, DenseLayer& grad,
                      std::span<double> dx) {
  for (int i = 0; i < layer.out; ++i) {
    const double di = d[i];
    double* grow = grad.w.data() + static_cast<size_t>(i) * layer.in;
    for (int j = 0; j < layer.in; ++j) grow[j] += di * x[j];
    grad.b[i] += di;
  }
  if (!dx.empty()) {
    for (int j = 0; j < layer.in; ++j) {
      double acc = 0.0;
      for (int i = 0; i < layer.out; ++i)
        acc += layer.w[static_cast<size_t>(i) * layer.in + j] * d[i];
      dx[j] = acc;
    }
  }
}

void tanh_backward(std::span<const double> activation, std::span<double> d) {
  for (size_t i = 0; i < d.size(); ++i)
    d[i] *= 1.0 - activation[i] * activation[i];
}

template <typename Params>
auto collect_pointers(Params& p) {
  using ptr_t =
      std::conditional_t<std::is_const_v<Params>, const double*, double*>;
  std::vector<ptr_t> out;
  for (auto* trunk : {&p.policy, &p.value}) {
    for (auto& layer : *trunk) {
      for (auto& x : layer.w) out.push_back(&x);
      for (auto& x : layer.b) out.push_back(&x);
    }
  }
  return out;
}

bool layers_finite(const std::vector<DenseLayer>& layers) {
  for (const auto& layer : layers) {
    for (double x : layer.w)
      if (!std::isfinite(x)) return false;
    for (double x : layer.b)
      if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_tape(const ParamSet& params, const Tape& tape) {
  const bool ok =
      tape.obs.size() == static_cast<size_t>(params.obs_dim) &&
      tape.policy_h1.size() == static_cast<size_t>(params.hidden) &&
      tape.policy_h2.size() == static_cast<size_t>(params.hidden) &&
      tape.value_h1.size() == static_cast<size_t>(params.hidden) &&
      tape.value_h2.size() == static_cast<size_t>(params.hidden) &&
      tape.logits.size() == static_cast<size_t>(params.action_count);
  if (!ok) throw std::logic_error("backward: tape does not match params");
}

}  // namespace

void GradSet::set_zero() {
  for (auto* trunk : {&policy, &value}) {
    for (auto& layer : *trunk) {
      std::fill(layer.w.begin(), layer.w.end(), 0.0);
      std::fill(layer.b.begin(), layer.b.end(), 0.0);
    }
  }
}

ParamSet init_params(int obs_dim, int action_count, uint64_t seed, int hidden) {
  if (obs_dim < 1) throw std::invalid_argument("init_params: obs_dim < 1");
  if (action_count < 2)
    throw std::invalid_argument(
        "init_params: need at least 2 actions to form a distribution");
  if (hidden < 1) throw std::invalid_argument("init_params: hidden < 1");

  Rng rng(seed);
  ParamSet p;
  p.obs_dim = obs_dim;
  p.action_count = action_count;
  p.hidden = hidden;
  const double root2 = std::sqrt(2.0);
  p.policy.push_back(make_layer(obs_dim, hidden, root2, rng));
  p.policy.push_back(make_layer(hidden, hidden, root2, rng));
  p.policy.push_back(make_layer(hidden, action_count, 0.01, rng));
  p.value.push_back(make_layer(obs_dim, hidden, root2, rng));
  p.value.push_back(make_layer(hidden, hidden, root2, rng));
  p.value.push_back(make_layer(hidden, 1, 1.0, rng));
  return p;
}

void forward(const ParamSet& params, std::span<const double> obs, Tape& tape) {
  if (obs.size() != static_cast<size_t>(params.obs_dim))
    throw std::invalid_argument("forward: observation size mismatch");
  tape.obs.assign(obs.begin(), obs.end());
  tape.policy_h1.resize(params.hidden);
  tape.policy_h2.resize(params.hidden);
  tape.logits.resize(params.action_count);
  tape.value_h1.resize(params.hidden);
  tape.value_h2.resize(params.hidden);

  affine(params.policy[0], obs, tape.policy_h1);
  tanh_inplace(tape.policy_h1);
  affine(params.policy[1], tape.policy_h1, tape.policy_h2);
  tanh_inplace(tape.policy_h2);
  affine(params.policy[2], tape.policy_h2, tape.logits);

  affine(params.value[0], obs, tape.value_h1);
  tanh_inplace(tape.value_h1);
  affine(params.value[1], tape.value_h1, tape.value_h2);
  tanh_inplace(tape.value_h2);
  double v = 0.0;
  affine(params.value[2], tape.value_h2, std::span<double>(&v, 1));
  tape.value = v;
}

ForwardOut forward(const ParamSet& params, std::span<const double> obs) {
  Tape tape;
  forward(params, obs, tape);
  return ForwardOut{std::move(tape.logits), tape.value};
}

void softmax(std::span<const double> logits, std::span<double> probs) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - m);
    sum += probs[i];
  }
  for (size_t i = 0; i < logits.size(); ++i) probs[i] /= sum;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> probs(logits.size());
  softmax(logits, probs);
  return probs;
}

void backward(const ParamSet& params, const Tape& tape,
              std::span<const double> dlogits, double dvalue, GradSet& grads) {
  check_tape(params, tape);
  if (dlogits.size() != static_cast<size_t>(params.action_count))
    throw std::invalid_argument("backward: dlogits size mismatch");

  std::vector<double> d2(params.hidden), d1(params.hidden);

  // policy trunk
  accumulate_layer(params.policy[2], tape.policy_h2, dlogits, grads.policy[2],
                   d2);
  tanh_backward(tape.policy_h2, d2);
  accumulate_layer(params.policy[1], tape.policy_h1, d2, grads.policy[1], d1);
  tanh_backward(tape.policy_h1, d1);
  accumulate_layer(params.policy[0], tape.obs, d1, grads.policy[0], {});

  // value trunk
  accumulate_layer(params.value[2], tape.value_h2,
                   std::span<const double>(&dvalue, 1), grads.value[2], d2);
  tanh_backward(tape.value_h2, d2);
  accumulate_layer(params.value[1], tape.value_h1, d2, grads.value[1], d1);
  tanh_backward(tape.value_h1, d1);
  accumulate_layer(params.value[0], tape.obs, d1, grads.value[0], {});
}

GradSet zeros_like(const ParamSet& params) {
  GradSet g;
  g.obs_dim = params.obs_dim;
  g.action_count = params.action_count;
  g.hidden = params.hidden;
  auto zero_of = [](const std::vector<DenseLayer>& src) {
    std::vector<DenseLayer> out;
    for (const auto& layer : src) {
      DenseLayer z;
      z.in = layer.in;
      z.out = layer.out;
      z.w.assign(layer.w.size(), 0.0);
      z.b.assign(layer.b.size(), 0.0);
      out.push_back(std::move(z));
    }
    return out;
  };
  g.policy = zero_of(params.policy);
  g.value = zero_of(params.value);
  return g;
}

OptimizerState make_optimizer_state(const ParamSet& params) {
  return OptimizerState{zeros_like(params), zeros_like(params), 0};
}

double global_norm(const GradSet& grads) {
  double sq = 0.0;
  for (const auto* trunk : {&grads.policy, &grads.value}) {
    for (const auto& layer : *trunk) {
      for (double x : layer.w) sq += x * x;
      for (double x : layer.b) sq += x * x;
    }
  }
  return std::sqrt(sq);
}

bool all_finite(const ParamSet& params) {
  return layers_finite(params.policy) && layers_finite(params.value);
}

bool all_finite(const GradSet& grads) {
  return layers_finite(grads.policy) && layers_finite(grads.value);
}

size_t param_count(const ParamSet& params) {
  size_t n = 0;
  for (const auto* trunk : {&params.policy, &params.value})
    for (const auto& layer : *trunk) n += layer.w.size() + layer.b.size();
  return n;
}

void optimizer_step(ParamSet& params, const GradSet& grads,
                    OptimizerState& state, double lr, double max_norm) {
  if (!all_finite(grads))
    throw std::runtime_error("optimizer_step: non-finite gradient");
  if (max_norm <= 0.0)
    throw std::invalid_argument("optimizer_step: max_norm must be positive");

  const double norm = global_norm(grads);
  const double scale = norm > max_norm ? max_norm / norm : 1.0;

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double m_corr = 1.0 - std::pow(kAdamBeta1, t);
  const double v_corr = 1.0 - std::pow(kAdamBeta2, t);

  auto ps = param_pointers(params);
  auto gs = param_pointers(grads);
  auto ms = param_pointers(state.m);
  auto vs = param_pointers(state.v);
  for (size_t i = 0; i < ps.size(); ++i) {
    const double g = *gs[i] * scale;
    double& m = *ms[i];
    double& v = *vs[i];
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * g * g;
    const double m_hat = m / m_corr;
    const double v_hat = v / v_corr;
    *ps[i] += lr * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
  }
  if (!all_finite(params))
    throw std::runtime_error("optimizer_step: parameters became non-finite");
}

std::vector<double*> param_pointers(ParamSet& params) {
  return collect_pointers(params);
}
std::vector<const double*> param_pointers(const ParamSet& params) {
  return collect_pointers(params);
}
std::vector<double*> param_pointers(GradSet& grads) {
  return collect_pointers(grads);
}
std::vector<const double*> param_pointers(const GradSet& grads) {
  return collect_pointers(grads);
}

}  // namespace cdpo::nn
