// Acceptance suite: runs every criterion end to end and prints one
// pass/fail line per criterion. Exit code 0 only if all criteria pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cdpo/envs.hpp"
#include "cdpo/experiment.hpp"
#include "cdpo/plot.hpp"
#include "cdpo/regularizers.hpp"
#include "cdpo/rng.hpp"
#include "cdpo/verification.hpp"

using namespace cdpo;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  bool pass;
  std::string detail;
  double seconds;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// area under the mean learning curve; rows before the first completed
// episode count as zero return
double curve_auc(const std::vector<long>& steps,
                 const std::vector<double>& values) {
  double auc = 0.0;
  double prev_v = 0.0;
  long prev_s = 0;
  for (size_t i = 0; i < steps.size(); ++i) {
    const double v = std::isnan(values[i]) ? 0.0 : values[i];
    auc += 0.5 * (v + prev_v) * static_cast<double>(steps[i] - prev_s);
    prev_v = v;
    prev_s = steps[i];
  }
  return auc;
}

int seeds_reaching(const lab::SweepCell& cell, double threshold) {
  int count = 0;
  for (const auto& s : cell.seeds)
    if (s.ok && !std::isnan(s.final_return) && s.final_return >= threshold)
      count += 1;
  return count;
}

lab::ExperimentConfig cartpole_base() {
  lab::ExperimentConfig cfg;
  cfg.env.kind = env::EnvKind::CartPole;
  cfg.total_timesteps = 100000;
  return cfg;
}

lab::ExperimentConfig carterpillar_base(int carts) {
  lab::ExperimentConfig cfg;
  cfg.env.kind = env::EnvKind::Carterpillar;
  cfg.env.carts = carts;
  cfg.total_timesteps = 300000;
  return cfg;
}

Criterion criterion_1() {
  const auto r = lab::check_regularizer_exactness(1000);
  return {1, r.pass, r.detail, 0.0};
}

Criterion criterion_2() {
  const auto brackets = lab::check_bracket_gradients(1000);
  const auto objective = lab::check_objective_gradients(10);
  return {2, brackets.pass && objective.pass,
          brackets.detail + "; " + objective.detail, 0.0};
}

Criterion criterion_3() {
  const auto r = lab::check_stationarity({2, 3, 4}, 1e-4, 1e-10);
  return {3, r.pass, r.detail, 0.0};
}

struct CartpoleResults {
  lab::SweepSummary summary;
  bool ready = false;
};

CartpoleResults run_cartpole_suite() {
  lab::SweepSpec spec;
  spec.base = cartpole_base();
  spec.algos = {"cdpo", "ppo-ent", "ppo"};
  spec.reg_coefs = {1e-1, 1e-2, 1e-3};
  spec.seeds = {0, 1, 2};
  spec.workers = 2;
  CartpoleResults results;
  results.summary = lab::sweep(spec);
  results.ready = true;
  return results;
}

Criterion criterion_4(const CartpoleResults& results) {
  std::ostringstream detail;
  bool pass = true;
  for (double coef : {1e-1, 1e-2, 1e-3}) {
    const auto* cell = results.summary.find("cdpo", coef);
    const int good = cell ? seeds_reaching(*cell, 475.0) : 0;
    detail << "cdpo c=" << lab::format_double(coef) << ": " << good
           << "/3 seeds >= 475; ";
    pass = pass && good >= 2;
  }
  const auto* base = results.summary.find("ppo", 0.0);
  const int good = base ? seeds_reaching(*base, 475.0) : 0;
  detail << "ppo: " << good << "/3 seeds >= 475";
  pass = pass && good >= 2;
  return {4, pass, detail.str(), 0.0};
}

Criterion criterion_5(const CartpoleResults& results) {
  auto auc_range = [&](const std::string& algo) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& cell : results.summary.cells) {
      if (cell.algo != algo) continue;
      const double auc = curve_auc(cell.steps, cell.mean_curve);
      if (first) {
        lo = hi = auc;
        first = false;
      } else {
        lo = std::min(lo, auc);
        hi = std::max(hi, auc);
      }
    }
    return hi - lo;
  };
  const double cdpo_range = auc_range("cdpo");
  const double ent_range = auc_range("ppo-ent");
  std::ostringstream detail;
  detail << "AUC range over coefficients: cdpo "
         << lab::format_double(cdpo_range) << " vs ppo-ent "
         << lab::format_double(ent_range);
  return {5, cdpo_range <= ent_range, detail.str(), 0.0};
}

Criterion criterion_6() {
  lab::SweepSpec spec;
  spec.base = carterpillar_base(2);
  spec.algos = {"cdpo", "ppo-ent", "ppo"};
  spec.reg_coefs = {1e-2};
  spec.seeds = {0, 1, 2};
  spec.workers = 2;
  const auto summary = lab::sweep(spec);

  std::ostringstream detail;
  bool pass = true;
  const struct {
    const char* algo;
    double coef;
  } variants[] = {{"ppo", 0.0}, {"ppo-ent", 1e-2}, {"cdpo", 1e-2}};
  for (const auto& v : variants) {
    const auto* cell = summary.find(v.algo, v.coef);
    const int good = cell ? seeds_reaching(*cell, 450.0) : 0;
    detail << v.algo << ": " << good << "/3 seeds >= 450; ";
    pass = pass && good >= 2;
  }
  return {6, pass, detail.str(), 0.0};
}

Criterion criterion_7() {
  std::ostringstream detail;
  bool pass = true;

  // coupling-force cancellation over random states
  Rng rng(101);
  double worst_sum = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int c = 2 + rng.uniform_int(10);
    std::vector<double> x(c), v(c);
    for (int i = 0; i < c; ++i) {
      x[i] = rng.uniform(-2.4, 2.4);
      v[i] = rng.uniform(-5.0, 5.0);
    }
    const auto f = env::coupling_forces(x, v, 1.0, 1.0);
    double total = 0.0;
    for (double fi : f) total += fi;
    worst_sum = std::max(worst_sum, std::abs(total));
  }
  detail << "max |sum F| = " << worst_sum << "; ";
  pass = pass && worst_sum < 1e-12;

  // single-cart equivalence, exact match over 1000 transitions
  env::EnvConfig cp_cfg;
  cp_cfg.kind = env::EnvKind::CartPole;
  env::EnvConfig ct_cfg;
  ct_cfg.kind = env::EnvKind::Carterpillar;
  ct_cfg.carts = 1;
  env::CartPoleEnv cp(cp_cfg, 2024);
  env::CarterpillarEnv ct(ct_cfg, 2024);
  bool exact = cp.observation() == ct.observation();
  int transitions = 0;
  while (transitions < 1000 && exact) {
    const int action = rng.uniform_int(2);
    const auto ra = cp.step(action);
    const auto rb = ct.step(action);
    exact = ra.observation == rb.observation && ra.reward == rb.reward &&
            ra.terminated == rb.terminated && ra.truncated == rb.truncated;
    transitions += 1;
    if (ra.terminated || ra.truncated) {
      cp.reset();
      ct.reset();
    }
  }
  detail << (exact ? "single-cart equivalence exact; "
                   : "single-cart equivalence BROKEN; ");
  pass = pass && exact;

  // mirror symmetry of both dynamics
  double worst_mirror = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int c = 1 + rng.uniform_int(4);
    env::EnvConfig cfg;
    cfg.kind = env::EnvKind::Carterpillar;
    cfg.carts = c;
    std::vector<double> x(c), v(c), th(c), w(c);
    for (int i = 0; i < c; ++i) {
      x[i] = rng.uniform(-1, 1);
      v[i] = rng.uniform(-1, 1);
      th[i] = rng.uniform(-0.2, 0.2);
      w[i] = rng.uniform(-1, 1);
    }
    const int action = rng.uniform_int(2 * c);
    auto integrate = [&](double sign, int act) {
      std::vector<double> pos(c), vel(c);
      for (int i = 0; i < c; ++i) {
        pos[i] = sign * x[i];
        vel[i] = sign * v[i];
      }
      std::vector<double> forces(c, 0.0);
      if (c > 1)
        env::coupling_forces(pos, vel, cfg.spring_k, cfg.damper_b, forces);
      forces[act / 2] += (act % 2 == 1) ? cfg.force_mag : -cfg.force_mag;
      std::vector<double> out;
      for (int i = 0; i < c; ++i) {
        env::CartPoleState s{sign * x[i], sign * v[i], sign * th[i],
                             sign * w[i]};
        const auto n = env::cartpole_integrate(s, forces[i], cfg);
        out.insert(out.end(), {n.x, n.x_dot, n.theta, n.theta_dot});
      }
      return out;
    };
    const auto fwd = integrate(1.0, action);
    const auto rev = integrate(-1.0, action ^ 1);
    for (size_t k = 0; k < fwd.size(); ++k)
      worst_mirror = std::max(worst_mirror, std::abs(fwd[k] + rev[k]));
  }
  detail << "max mirror defect = " << worst_mirror;
  pass = pass && worst_mirror < 1e-12;

  return {7, pass, detail.str(), 0.0};
}

Criterion criterion_8() {
  std::ostringstream detail;
  bool pass = true;

  lab::ExperimentConfig cfg;
  cfg.env.kind = env::EnvKind::CartPole;
  cfg.total_timesteps = 2048;
  cfg.regularizer = reg::RegularizerKind::Complexity;
  cfg.reg_coef = 0.01;

  const auto a = lab::run(cfg, 12);
  const auto b = lab::run(cfg, 12);
  const std::string csv_a = lab::csv_string(a);
  const bool deterministic = csv_a == lab::csv_string(b);
  detail << (deterministic ? "csv deterministic; " : "csv NOT deterministic; ");
  pass = pass && deterministic;

  std::istringstream in(csv_a);
  const auto parsed = lab::parse_csv(in);
  const bool lossless = lab::csv_string(parsed) == csv_a;
  detail << (lossless ? "csv round-trip lossless; " : "csv round-trip LOSSY; ");
  pass = pass && lossless;

  const auto summary = lab::summarize({a, b});
  const bool plot_ok = lab::render_learning_curves(summary) ==
                       lab::render_learning_curves(summary);
  detail << (plot_ok ? "plot deterministic" : "plot NOT deterministic");
  pass = pass && plot_ok;

  return {8, pass, detail.str(), 0.0};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto wanted = [&](int id) { return selected.empty() || selected.count(id); };

  std::vector<Criterion> results;
  auto record = [&](Criterion c, double t0) {
    c.seconds = now_seconds() - t0;
    results.push_back(c);
  };

  if (wanted(1)) {
    const double t0 = now_seconds();
    record(criterion_1(), t0);
  }
  if (wanted(2)) {
    const double t0 = now_seconds();
    record(criterion_2(), t0);
  }
  if (wanted(3)) {
    const double t0 = now_seconds();
    record(criterion_3(), t0);
  }

  if (wanted(4) || wanted(5)) {
    const double t0 = now_seconds();
    const CartpoleResults cartpole = run_cartpole_suite();
    const double shared = now_seconds() - t0;
    if (wanted(4)) {
      Criterion c = criterion_4(cartpole);
      c.seconds = shared;
      results.push_back(c);
    }
    if (wanted(5)) {
      Criterion c = criterion_5(cartpole);
      c.seconds = shared;
      results.push_back(c);
    }
  }
  if (wanted(6)) {
    const double t0 = now_seconds();
    record(criterion_6(), t0);
  }
  if (wanted(7)) {
    const double t0 = now_seconds();
    record(criterion_7(), t0);
  }
  if (wanted(8)) {
    const double t0 = now_seconds();
    record(criterion_8(), t0);
  }

  bool all_pass = true;
  for (const auto& c : results) {
    std::cout << (c.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id
              << ": " << c.detail << " (" << static_cast<long>(c.seconds)
              << " s)" << std::endl;
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 1;
}
