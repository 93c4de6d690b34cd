#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cdpo::lab {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Frozen regularizer values, exact zeros at uniform/one-hot, permutation
// invariance on randomized inputs.
CheckResult check_regularizer_exactness(int cases = 1000, uint64_t seed = 7);

// Analytic gradient bracket vs central finite differences along
// simplex-tangent directions, n in {2..18}.
CheckResult check_bracket_gradients(int cases = 1000, uint64_t seed = 9);

// Assembled objective gradient vs end-to-end finite differences on small
// random instances, once per regularizer kind.
CheckResult check_objective_gradients(int instances_per_kind = 10,
                                      uint64_t seed = 11);

// Projected-ascent stationarity structure: exactly n permutation-equivalent
// complexity maxima and vanishing projected gradients at uniform.
CheckResult check_stationarity(const std::vector<int>& ns = {2, 3, 4},
                               double tol = 1e-4, double uniform_tol = 1e-10);

std::vector<CheckResult> run_verification_suite();

}  // namespace cdpo::lab
