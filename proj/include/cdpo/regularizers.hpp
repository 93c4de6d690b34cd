#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cdpo::reg {

// Probabilities below this are clamped inside log terms only, so entropy and
// its gradients stay finite at near-deterministic policies. Disequilibrium is
// polynomial and always uses the raw probabilities.
inline constexpr double kProbFloor = 1e-12;

enum class RegularizerKind { None, Entropy, Complexity };

std::string to_string(RegularizerKind kind);
RegularizerKind regularizer_from_string(const std::string& name);

// S = -sum p_i ln p_i, natural log, 0*ln(0) == 0.
double entropy(std::span<const double> probs);

// D = sum (p_i - 1/n)^2.
double disequilibrium(std::span<const double> probs);

// C = S * D; zero exactly when the distribution is uniform or one-hot.
double complexity(std::span<const double> probs);

// dS/dp_a = -(ln p_a + 1).
void entropy_grad(std::span<const double> probs, std::span<double> out);

// dC/dp_a = -D*(ln p_a + 1) + 2*S*(p_a - 1/n). The chain through the softmax
// and network Jacobians is applied by the caller (nn::backward).
void complexity_grad(std::span<const double> probs, std::span<double> out);

double regularizer_value(RegularizerKind kind, std::span<const double> probs);
void regularizer_grad(RegularizerKind kind, std::span<const double> probs,
                      std::span<double> out);

// Euclidean projection onto the probability simplex.
void project_to_simplex(std::span<double> p);

// Removes the component normal to the simplex (subtracts the mean).
void tangent_project(std::span<double> g);

struct StationarityReport {
  int n = 0;
  int starts = 0;
  int converged = 0;
  int failed = 0;  // runs that did not reach the gradient tolerance
  // projected gradient norms at the uniform distribution
  double uniform_grad_entropy = 0.0;
  double uniform_grad_disequilibrium = 0.0;
  double uniform_grad_complexity = 0.0;
  // distinct complexity maxima found (clustered with tol)
  std::vector<std::vector<double>> maxima;
  // sorted probability profile shared by the maxima (empty if inconsistent)
  std::vector<double> shared_profile;
  bool permutation_consistent = false;
  double max_residual = 0.0;  // largest projected-gradient norm at a maximum
  double max_complexity = 0.0;

  int distinct_maxima() const { return static_cast<int>(maxima.size()); }
};

// Runs projected gradient ascent of C on the simplex from `starts` random
// interior points (step 1e-2, at most 1e5 iterations per start) and reports
// the stationary structure. Requires n >= 2 and starts >= 10*n.
StationarityReport verify_stationarity(int n, int starts, double tol,
                                       uint64_t seed = 0);

}  // namespace cdpo::reg
