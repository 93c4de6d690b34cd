#include "cdpo/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cdpo/rng.hpp"

namespace cdpo::reg {

namespace {

double tangent_norm(std::span<const double> g) {
  double mean = 0.0;
  for (double x : g) mean += x;
  mean /= static_cast<double>(g.size());
  double sq = 0.0;
  for (double x : g) sq += (x - mean) * (x - mean);
  return std::sqrt(sq);
}

}  // namespace

std::string to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::None: return "none";
    case RegularizerKind::Entropy: return "entropy";
    case RegularizerKind::Complexity: return "complexity";
  }
  return "none";
}

RegularizerKind regularizer_from_string(const std::string& name) {
  if (name == "none") return RegularizerKind::None;
  if (name == "entropy") return RegularizerKind::Entropy;
  if (name == "complexity") return RegularizerKind::Complexity;
  throw std::invalid_argument("unknown regularizer: " + name);
}

double entropy(std::span<const double> probs) {
  double s = 0.0;
  for (double p : probs) s -= p * std::log(std::max(p, kProbFloor));
  return s;
}

double disequilibrium(std::span<const double> probs) {
  const double inv_n = 1.0 / static_cast<double>(probs.size());
  double d = 0.0;
  for (double p : probs) d += (p - inv_n) * (p - inv_n);
  return d;
}

double complexity(std::span<const double> probs) {
  return entropy(probs) * disequilibrium(probs);
}

void entropy_grad(std::span<const double> probs, std::span<double> out) {
  for (size_t i = 0; i < probs.size(); ++i)
    out[i] = -(std::log(std::max(probs[i], kProbFloor)) + 1.0);
}

void complexity_grad(std::span<const double> probs, std::span<double> out) {
  const double s = entropy(probs);
  const double d = disequilibrium(probs);
  const double inv_n = 1.0 / static_cast<double>(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) {
    const double logp = std::log(std::max(probs[i], kProbFloor));
    out[i] = -d * (logp + 1.0) + 2.0 * s * (probs[i] - inv_n);
  }
}

double regularizer_value(RegularizerKind kind, std::span<const double> probs) {
  switch (kind) {
    case RegularizerKind::None: return 0.0;
    case RegularizerKind::Entropy: return entropy(probs);
    case RegularizerKind::Complexity: return complexity(probs);
  }
  return 0.0;
}

void regularizer_grad(RegularizerKind kind, std::span<const double> probs,
                      std::span<double> out) {
  switch (kind) {
    case RegularizerKind::None:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case RegularizerKind::Entropy:
      entropy_grad(probs, out);
      return;
    case RegularizerKind::Complexity:
      complexity_grad(probs, out);
      return;
  }
}

void project_to_simplex(std::span<double> p) {
  // Sort-based Euclidean projection (Held et al.).
  const int n = static_cast<int>(p.size());
  std::vector<double> u(p.begin(), p.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  for (double& x : p) x = std::max(x - theta, 0.0);
}

void tangent_project(std::span<double> g) {
  double mean = 0.0;
  for (double x : g) mean += x;
  mean /= static_cast<double>(g.size());
  for (double& x : g) x -= mean;
}

StationarityReport verify_stationarity(int n, int starts, double tol,
                                       uint64_t seed) {
  if (n < 2) throw std::invalid_argument("verify_stationarity: n < 2");
  if (starts < 10 * n)
    throw std::invalid_argument("verify_stationarity: starts must be >= 10*n");
  if (tol <= 0.0) throw std::invalid_argument("verify_stationarity: tol <= 0");

  constexpr double kStep = 1e-2;
  constexpr int kMaxIters = 100000;
  constexpr double kResidualTol = 1e-10;

  StationarityReport report;
  report.n = n;
  report.starts = starts;

  // Projected gradient norms at the uniform point.
  std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  std::vector<double> g(n);
  entropy_grad(uniform, g);
  report.uniform_grad_entropy = tangent_norm(g);
  for (int i = 0; i < n; ++i) g[i] = 2.0 * (uniform[i] - 1.0 / n);
  report.uniform_grad_disequilibrium = tangent_norm(g);
  complexity_grad(uniform, g);
  report.uniform_grad_complexity = tangent_norm(g);

  Rng rng(seed ^ 0x5e11a7ull);
  std::vector<std::vector<double>> endpoints;
  std::vector<double> p(n);

  for (int s = 0; s < starts; ++s) {
    // random interior start, kept away from the boundary
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      p[i] = 0.05 + rng.uniform();
      sum += p[i];
    }
    for (int i = 0; i < n; ++i) p[i] /= sum;

    bool converged = false;
    for (int it = 0; it < kMaxIters; ++it) {
      complexity_grad(p, g);
      tangent_project(g);
      double gn = 0.0;
      for (double x : g) gn += x * x;
      gn = std::sqrt(gn);
      if (gn < kResidualTol) {
        converged = true;
        report.max_residual = std::max(report.max_residual, gn);
        break;
      }
      for (int i = 0; i < n; ++i) p[i] += kStep * g[i];
      project_to_simplex(p);
    }
    if (!converged) {
      report.failed += 1;
      continue;
    }
    report.converged += 1;
    endpoints.push_back(p);
  }

  // Cluster endpoints and discard non-maximal stationary points (the uniform
  // minimum and any saddles have strictly lower complexity).
  double best_c = 0.0;
  for (const auto& q : endpoints) best_c = std::max(best_c, complexity(q));
  report.max_complexity = best_c;

  for (const auto& q : endpoints) {
    if (complexity(q) < best_c - tol) continue;
    bool found = false;
    for (const auto& m : report.maxima) {
      double dist = 0.0;
      for (int i = 0; i < n; ++i) dist = std::max(dist, std::abs(m[i] - q[i]));
      if (dist <= tol) {
        found = true;
        break;
      }
    }
    if (!found) report.maxima.push_back(q);
  }

  // All maxima should be permutations of one probability multiset.
  report.permutation_consistent = !report.maxima.empty();
  if (!report.maxima.empty()) {
    report.shared_profile = report.maxima.front();
    std::sort(report.shared_profile.begin(), report.shared_profile.end());
    for (const auto& m : report.maxima) {
      std::vector<double> sorted(m);
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < n; ++i) {
        if (std::abs(sorted[i] - report.shared_profile[i]) > tol) {
          report.permutation_consistent = false;
          break;
        }
      }
    }
  }
  return report;
}

}  // namespace cdpo::reg
