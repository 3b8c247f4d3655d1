#include "bcdpep/bcd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bcdpep/format.hpp"

namespace bcdpep {

BcdTrace run_cyclic_bcd(const QuadraticProblem& p, std::span<const double> x0,
                        int outer_iterations) {
  if (outer_iterations < 0) throw std::invalid_argument("run_cyclic_bcd: negative iteration count");
  const int d = p.dimension();
  if (static_cast<int>(x0.size()) != d)
    throw std::invalid_argument("run_cyclic_bcd: x0 dimension mismatch");
  if (p.block_smoothness.empty() || p.sigma_min <= 0.0)
    throw std::invalid_argument("run_cyclic_bcd: problem constants not populated");
  const int pp = p.partition.block_count();
  const int m = (outer_iterations + 1) * pp;

  BcdTrace tr;
  tr.outer_iterations = outer_iterations;
  tr.block_count = pp;
  tr.points = linalg::Matrix(m + 1, d);
  tr.gradients = linalg::Matrix(m + 1, d);
  tr.objective_gaps.resize(m + 1);
  tr.minimizer = p.minimizer;
  tr.block_smoothness = p.block_smoothness;
  tr.common_smoothness = p.max_block_smoothness();
  tr.radius = level_radius(p, x0);
  for (double li : p.block_smoothness)
    if (li != tr.common_smoothness) tr.unequal_smoothness = true;

  linalg::Vector x(x0.begin(), x0.end());
  linalg::Vector r(d), grad(d);

  auto record = [&](int q) {
    linalg::matvec(p.design, x, r);
    for (int j = 0; j < d; ++j) r[j] -= p.rhs[j];
    linalg::matvec_transpose(p.design, r, grad);
    if (!linalg::all_finite(x) || !linalg::all_finite(grad))
      throw std::runtime_error("run_cyclic_bcd: nonfinite state at flat step " + std::to_string(q) +
                               " (check instance scaling)");
    std::copy(x.begin(), x.end(), tr.points.row(q).begin());
    std::copy(grad.begin(), grad.end(), tr.gradients.row(q).begin());
    tr.objective_gaps[q] = 0.5 * linalg::norm2_squared(r) - p.optimal_value;
  };

  record(0);
  for (int k = 0; k <= outer_iterations; ++k) {
    for (int i = 0; i < pp; ++i) {
      // x_block -= grad_block / L_i, using the gradient recorded at the
      // previous state (the residual r is still current for it).
      const int off = p.partition.block_offset(i);
      const int sz = p.partition.block_size(i);
      const double li = p.block_smoothness[i];
      for (int j = 0; j < sz; ++j) x[off + j] -= grad[off + j] / li;
      record(flatten(k, i + 1, pp));
    }
  }
  return tr;
}

namespace {

double block_norm2_squared(std::span<const double> v, int off, int sz) {
  double s = 0.0;
  for (int j = off; j < off + sz; ++j) s += v[j] * v[j];
  return s;
}

}  // namespace

PepSlackReport pep_constraint_residuals(const BcdTrace& trace, const QuadraticProblem& p) {
  const int pp = trace.block_count;
  const int m = trace.steps();
  const int d = p.dimension();
  const double lc = trace.common_smoothness;
  const double r = trace.radius;
  if (lc <= 0.0 || r <= 0.0)
    throw std::invalid_argument("pep_constraint_residuals: normalization constants must be positive");
  const double gap_scale = 1.0 / (pp * lc * r * r);
  const double grad_scale = 1.0 / (pp * lc * r);
  const double half_p = 0.5 * pp;

  PepSlackReport rep;
  rep.block_count = pp;
  rep.steps = m;
  rep.consecutive.resize(static_cast<std::size_t>(m) * pp);
  rep.gap_floor.resize(static_cast<std::size_t>(m) * pp);
  rep.optimal.resize(static_cast<std::size_t>(m) * pp);
  rep.origin.resize(pp);

  // delta_q and normalized gradients; x rows are used unnormalized with the
  // explicit 1/R factor on inner products.
  linalg::Vector delta(m + 1);
  for (int q = 0; q <= m; ++q) delta[q] = trace.objective_gaps[q] * gap_scale;

  linalg::Vector xs = trace.minimizer;

#pragma omp parallel for if (m >= 64) schedule(static)
  for (int q = 1; q <= m; ++q) {
    const auto xq = trace.point(q);
    const auto xprev = trace.point(q - 1);
    const auto gq_raw = trace.gradient(q);
    const auto gprev_raw = trace.gradient(q - 1);
    double dot_prev = 0.0, dot_star = 0.0;
    for (int j = 0; j < d; ++j) {
      dot_prev += gq_raw[j] * (xprev[j] - xq[j]);
      dot_star += gq_raw[j] * (xs[j] - xq[j]);
    }
    const double base_consecutive = delta[q - 1] - delta[q] - grad_scale * dot_prev / r;
    const double base_optimal = -delta[q] - grad_scale * dot_star / r;
    for (int t = 0; t < pp; ++t) {
      const int off = p.partition.block_offset(t);
      const int sz = p.partition.block_size(t);
      double diff2 = 0.0;
      for (int j = off; j < off + sz; ++j) {
        const double gd = (gprev_raw[j] - gq_raw[j]) * grad_scale;
        diff2 += gd * gd;
      }
      double g2 = block_norm2_squared(gq_raw, off, sz) * grad_scale * grad_scale;
      const std::size_t ix = static_cast<std::size_t>(q - 1) * pp + t;
      rep.consecutive[ix] = base_consecutive - half_p * diff2;
      rep.gap_floor[ix] = delta[q] - half_p * g2;
      rep.optimal[ix] = base_optimal - half_p * g2;
    }
  }

  {
    const auto x0 = trace.point(0);
    const auto g0 = trace.gradient(0);
    double dot_star = 0.0;
    for (int j = 0; j < d; ++j) dot_star += g0[j] * (xs[j] - x0[j]);
    const double base = -delta[0] - grad_scale * dot_star / r;
    for (int t = 0; t < pp; ++t) {
      const int off = p.partition.block_offset(t);
      const int sz = p.partition.block_size(t);
      const double g2 = block_norm2_squared(g0, off, sz) * grad_scale * grad_scale;
      rep.origin[t] = base - half_p * g2;
    }
  }
  return rep;
}

namespace {

void consider(PepSlackReport::Finding& best, const char* family, int flat, int block, double slack) {
  if (slack < best.slack) best = {family, flat, block, slack};
}

}  // namespace

PepSlackReport::Finding PepSlackReport::worst() const {
  Finding best{"none", 0, 0, std::numeric_limits<double>::infinity()};
  for (int q = 1; q <= steps; ++q) {
    for (int t = 0; t < block_count; ++t) {
      const std::size_t ix = static_cast<std::size_t>(q - 1) * block_count + t;
      consider(best, "consecutive", q, t, consecutive[ix]);
      consider(best, "gap_floor", q, t, gap_floor[ix]);
      consider(best, "optimal", q, t, optimal[ix]);
    }
  }
  for (int t = 0; t < block_count; ++t) consider(best, "origin", 0, t, origin[t]);
  return best;
}

PepSlackReport::Finding PepSlackReport::worst_updated_block() const {
  Finding best{"none", 0, 0, std::numeric_limits<double>::infinity()};
  for (int q = 1; q <= steps; ++q) {
    const int t = (q - 1) % block_count;
    const std::size_t ix = static_cast<std::size_t>(q - 1) * block_count + t;
    consider(best, "consecutive", q, t, consecutive[ix]);
    consider(best, "gap_floor", q, t, gap_floor[ix]);
    consider(best, "optimal", q, t, optimal[ix]);
  }
  consider(best, "origin", 0, 0, origin[0]);
  return best;
}

void write_trace_csv(const BcdTrace& trace, std::ostream& os) {
  os << "q,k,i,f_gap,grad_norm\n";
  for (int q = 0; q <= trace.steps(); ++q) {
    const FlatIndex ix = unflatten(q, trace.block_count);
    os << q << ',' << ix.outer << ',' << ix.inner << ',' << format_g17(trace.objective_gaps[q])
       << ',' << format_g17(linalg::norm2(trace.gradient(q))) << '\n';
  }
}

}  // namespace bcdpep
