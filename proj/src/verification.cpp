#include "cdpo/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdpo/nn.hpp"
#include "cdpo/ppo.hpp"
#include "cdpo/regularizers.hpp"
#include "cdpo/rng.hpp"
#include "cdpo/rollout.hpp"

namespace cdpo::lab {

namespace {

std::vector<double> random_interior(int n, Rng& rng) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (double& v : p) {
    v = 0.05 + rng.uniform();
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

}  // namespace

CheckResult check_regularizer_exactness(int cases, uint64_t seed) {
  CheckResult result{"regularizer exactness", true, ""};
  std::ostringstream detail;

  const std::vector<double> skew{0.8, 0.2};
  const double c_skew = reg::complexity(skew);
  if (std::abs(c_skew - 0.0900724) > 1e-6) {
    result.pass = false;
    detail << "complexity([0.8,0.2])=" << fmt(c_skew) << " off; ";
  }

  for (int n = 2; n <= 18; ++n) {
    std::vector<double> uniform(n, 1.0 / n);
    std::vector<double> onehot(n, 0.0);
    onehot[0] = 1.0;
    if (reg::complexity(uniform) != 0.0 || reg::complexity(onehot) != 0.0) {
      result.pass = false;
      detail << "non-zero complexity at uniform/one-hot for n=" << n << "; ";
    }
  }

  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < cases; ++i) {
    const int n = 2 + rng.uniform_int(17);
    std::vector<double> p = random_interior(n, rng);
    std::vector<double> q(p);
    const std::vector<int> perm = rng.permutation(n);
    for (int k = 0; k < n; ++k) q[k] = p[perm[k]];
    const double a = reg::complexity(p);
    const double b = reg::complexity(q);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-12));
  }
  if (worst > 1e-12) {
    result.pass = false;
    detail << "permutation invariance violated, rel err " << fmt(worst) << "; ";
  }
  detail << "complexity([0.8,0.2])=" << fmt(c_skew)
         << ", permutation rel err " << fmt(worst);
  result.detail = detail.str();
  return result;
}

CheckResult check_bracket_gradients(int cases, uint64_t seed) {
  CheckResult result{"complexity gradient vs finite differences", true, ""};
  Rng rng(seed);
  const double h = 1e-6;
  double worst = 0.0;

  for (int i = 0; i < cases; ++i) {
    const int n = 2 + rng.uniform_int(17);
    std::vector<double> p = random_interior(n, rng);
    std::vector<double> bracket(n);
    reg::complexity_grad(p, bracket);

    // finite differences along e_a - e_0 reproduce g_a - g_0
    std::vector<double> plus(p), minus(p);
    double diff_sq = 0.0, fd_sq = 0.0;
    for (int a = 1; a < n; ++a) {
      plus = p;
      minus = p;
      plus[a] += h;
      plus[0] -= h;
      minus[a] -= h;
      minus[0] += h;
      const double fd =
          (reg::complexity(plus) - reg::complexity(minus)) / (2.0 * h);
      const double an = bracket[a] - bracket[0];
      diff_sq += (fd - an) * (fd - an);
      fd_sq += fd * fd;
    }
    const double rel =
        std::sqrt(diff_sq) / std::max(std::sqrt(fd_sq), 1e-3);
    worst = std::max(worst, rel);
  }
  result.pass = worst < 1e-6;
  result.detail = "max rel err " + fmt(worst) + " over " +
                  std::to_string(cases) + " distributions";
  return result;
}

CheckResult check_objective_gradients(int instances_per_kind, uint64_t seed) {
  CheckResult result{"objective gradient vs finite differences", true, ""};
  Rng rng(seed);
  double worst = 0.0;

  const reg::RegularizerKind kinds[] = {reg::RegularizerKind::None,
                                        reg::RegularizerKind::Entropy,
                                        reg::RegularizerKind::Complexity};
  for (const auto kind : kinds) {
    for (int inst = 0; inst < instances_per_kind; ++inst) {
      const int obs_dim = 3, actions = 3, hidden = 8, b = 4;
      nn::ParamSet params =
          nn::init_params(obs_dim, actions, rng.next_bits(), hidden);
      nn::ParamSet old_params =
          nn::init_params(obs_dim, actions, rng.next_bits(), hidden);

      rl::RolloutBuffer buffer;
      buffer.resize(b, 1, obs_dim, actions);
      rl::Minibatch mb;
      mb.buffer = &buffer;
      for (int i = 0; i < b; ++i) {
        for (int d = 0; d < obs_dim; ++d)
          buffer.obs[i * obs_dim + d] = rng.normal();
        const int a = rng.uniform_int(actions);
        buffer.actions[i] = a;
        const auto out = nn::forward(old_params, buffer.observation(i));
        const auto probs = nn::softmax(out.logits);
        buffer.log_probs[i] = std::log(probs[a]);
        buffer.value_targets[i] = rng.uniform(-1.0, 1.0);
        mb.indices.push_back(i);
        mb.norm_advantages.push_back(rng.uniform(-2.0, 2.0));
      }
      buffer.gae_done = true;

      rl::LossConfig cfg;
      cfg.clip_range = 0.2;
      cfg.c_vf = 0.5;
      cfg.regularizer = kind;
      cfg.reg_coef = kind == reg::RegularizerKind::None ? 0.0 : 0.05;

      nn::GradSet grads = nn::zeros_like(params);
      rl::objective_with_grad(mb, params, cfg, grads);
      const auto grad_ptrs = nn::param_pointers(grads);
      const auto param_ptrs = nn::param_pointers(params);

      const double h = 1e-6;
      double diff_sq = 0.0, norm_sq = 0.0;
      for (size_t k = 0; k < param_ptrs.size(); ++k) {
        const double saved = *param_ptrs[k];
        *param_ptrs[k] = saved + h;
        const double f_plus = rl::total_objective(mb, params, cfg).first;
        *param_ptrs[k] = saved - h;
        const double f_minus = rl::total_objective(mb, params, cfg).first;
        *param_ptrs[k] = saved;
        const double fd = (f_plus - f_minus) / (2.0 * h);
        diff_sq += (fd - *grad_ptrs[k]) * (fd - *grad_ptrs[k]);
        norm_sq += *grad_ptrs[k] * *grad_ptrs[k];
      }
      const double rel =
          std::sqrt(diff_sq) / std::max(std::sqrt(norm_sq), 1e-8);
      worst = std::max(worst, rel);
    }
  }
  result.pass = worst < 1e-4;
  result.detail = "max vector rel err " + fmt(worst) + " over " +
                  std::to_string(3 * instances_per_kind) + " instances";
  return result;
}

CheckResult check_stationarity(const std::vector<int>& ns, double tol,
                               double uniform_tol) {
  CheckResult result{"stationarity structure", true, ""};
  std::ostringstream detail;
  for (int n : ns) {
    const reg::StationarityReport report =
        reg::verify_stationarity(n, 20 * n, tol);
    detail << "n=" << n << ": " << report.distinct_maxima() << " maxima";
    if (report.failed > 0) detail << " (" << report.failed << " non-converged)";
    detail << "; ";
    if (report.distinct_maxima() != n || !report.permutation_consistent ||
        report.failed > 0) {
      result.pass = false;
    }
    if (report.uniform_grad_entropy >= uniform_tol ||
        report.uniform_grad_disequilibrium >= uniform_tol ||
        report.uniform_grad_complexity >= uniform_tol) {
      result.pass = false;
      detail << "uniform projected gradient too large; ";
    }
  }
  result.detail = detail.str();
  return result;
}

std::vector<CheckResult> run_verification_suite() {
  return {check_regularizer_exactness(), check_bracket_gradients(),
          check_objective_gradients(), check_stationarity()};
}

}  // namespace cdpo::lab
