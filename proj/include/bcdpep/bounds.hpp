#pragma once

#include <cstdint>

namespace bcdpep {

// Inputs shared by the closed-form bound evaluators.
struct BoundInputs {
  int p = 1;
  std::int64_t iterations = 0;  // k for the prior bound, N for the new one
  double l_max = 1.0;
  double l_min = 1.0;
  double l_global = 1.0;
  double l_common = 1.0;  // L_c
  double radius = 1.0;    // R(x0)
  void validate() const;  // positivity and l_global >= l_max >= l_min > 0
};

// Prior worst-case bound for cyclic block gradient descent:
//   4 L_max (1 + p L^2 / L_min^2) R^2 / (k + 8/p).
double beck_bound(std::int64_t k, int p, double l_max, double l_min, double l_global,
                  double radius);

// Equal-constant form 4 L_c (1 + p^3) R^2 / (k + 8/p); equals beck_bound with
// L_max = L_min = L_c and the global constant taken as p*L_c.
double beck_bound_equal(std::int64_t k, int p, double l_common, double radius);

// Certified multiplier value t = 1/(2(N+1)p+1).
double schedule_t(int n_outer, int p);

// Certified bound objective 0.5 * p * L_c * R^2 * t.
double dual_objective(double t, int p, double l_common, double radius);

// New worst-case bound p L_c R^2 / (4(N+1)p + 2) after N+1 cycles, computed
// as dual_objective(schedule_t(N, p), ...) so the two agree bit-exactly.
double new_bound(int n_outer, int p, double l_common, double radius);

// beck_bound_equal(N+1) / new_bound(N): bounds aligned at equal completed
// cycle counts; tends to 16(1+p^3) as N grows.
double bound_ratio(int n_outer, int p, double l_common, double radius);

}  // namespace bcdpep
