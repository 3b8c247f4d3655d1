#include "bcdpep/bounds.hpp"

#include <stdexcept>

namespace bcdpep {

void BoundInputs::validate() const {
  if (p < 1) throw std::invalid_argument("BoundInputs: block count must be >= 1");
  if (iterations < 0) throw std::invalid_argument("BoundInputs: iteration count must be >= 0");
  if (!(l_min > 0.0) || !(l_max >= l_min) || !(l_global >= l_max))
    throw std::invalid_argument("BoundInputs: need L >= L_max >= L_min > 0");
  if (!(l_common > 0.0)) throw std::invalid_argument("BoundInputs: L_c must be positive");
  if (!(radius >= 0.0)) throw std::invalid_argument("BoundInputs: radius must be nonnegative");
}

namespace {

void check_common(int p, double l_common, double radius) {
  if (p < 1) throw std::invalid_argument("bound: block count must be >= 1");
  if (!(l_common > 0.0)) throw std::invalid_argument("bound: L_c must be positive");
  if (!(radius >= 0.0)) throw std::invalid_argument("bound: radius must be nonnegative");
}

}  // namespace

double beck_bound(std::int64_t k, int p, double l_max, double l_min, double l_global,
                  double radius) {
  if (k < 0) throw std::invalid_argument("beck_bound: k must be >= 0");
  if (p < 1) throw std::invalid_argument("beck_bound: block count must be >= 1");
  if (!(l_max > 0.0) || !(l_min > 0.0) || !(l_global > 0.0))
    throw std::invalid_argument("beck_bound: constants must be positive");
  if (!(radius >= 0.0)) throw std::invalid_argument("beck_bound: radius must be nonnegative");
  const double ratio = l_global / l_min;
  return 4.0 * l_max * (1.0 + p * ratio * ratio) * radius * radius /
         (static_cast<double>(k) + 8.0 / p);
}

double beck_bound_equal(std::int64_t k, int p, double l_common, double radius) {
  if (k < 0) throw std::invalid_argument("beck_bound_equal: k must be >= 0");
  check_common(p, l_common, radius);
  const double pd = p;
  return 4.0 * l_common * (1.0 + pd * pd * pd) * radius * radius /
         (static_cast<double>(k) + 8.0 / pd);
}

double schedule_t(int n_outer, int p) {
  if (n_outer < 0) throw std::invalid_argument("schedule_t: N must be >= 0");
  if (p < 1) throw std::invalid_argument("schedule_t: block count must be >= 1");
  const std::int64_t den = 2 * (static_cast<std::int64_t>(n_outer) + 1) * p + 1;
  return 1.0 / static_cast<double>(den);
}

double dual_objective(double t, int p, double l_common, double radius) {
  if (!(t >= 0.0)) throw std::invalid_argument("dual_objective: t must be nonnegative");
  check_common(p, l_common, radius);
  return 0.5 * p * l_common * (radius * radius) * t;
}

double new_bound(int n_outer, int p, double l_common, double radius) {
  return dual_objective(schedule_t(n_outer, p), p, l_common, radius);
}

double bound_ratio(int n_outer, int p, double l_common, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("bound_ratio: radius must be positive");
  return beck_bound_equal(static_cast<std::int64_t>(n_outer) + 1, p, l_common, radius) /
         new_bound(n_outer, p, l_common, radius);
}

}  // namespace bcdpep
