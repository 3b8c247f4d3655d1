#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bcdpep/problem.hpp"

namespace bcdpep {

// Full record of a cyclic block gradient descent run: one row per block-update
// state, flat index q = outer*p + inner with (outer, p) == (outer+1, 0).
struct BcdTrace {
  int outer_iterations = 0;  // index of the last executed cycle; cycles 0..outer_iterations run
  int block_count = 0;
  linalg::Matrix points;          // (M+1) x D, row q = x at flat state q, M = (outer_iterations+1)*p
  linalg::Matrix gradients;       // (M+1) x D, full gradient at each state
  linalg::Vector objective_gaps;  // f(x_q) - f(x*)
  linalg::Vector minimizer;       // copy of the instance minimizer
  std::vector<double> block_smoothness;
  double common_smoothness = 0.0;  // L_c = max_i L_i, the normalization constant
  double radius = 0.0;             // R(x0)
  bool unequal_smoothness = false; // true when some L_i < L_c (common-constant substitution)

  int steps() const { return (outer_iterations + 1) * block_count; }  // M
  std::span<const double> point(int flat) const { return points.row(flat); }
  std::span<const double> gradient(int flat) const { return gradients.row(flat); }
};

// Runs exact-step cyclic block gradient descent (step 1/L_i on block i) from
// x0 for outer_iterations+1 cycles, recording every intermediate state.
BcdTrace run_cyclic_bcd(const QuadraticProblem& p, std::span<const double> x0,
                        int outer_iterations);

// Slack values of the interpolation constraints a trace must satisfy, in the
// normalization delta_q = gap_q/(p L_c R^2), g_q = grad_q/(p L_c R). Four
// families, each instantiated for every block index t (the constraints hold
// for all t, not only the updated block):
//   consecutive: delta_{q-1}-delta_q - <g_q, x_{q-1}-x_q>/R - (p/2)||g_{q-1}-g_q||_t^2
//   gap_floor:   delta_q - (p/2)||g_q||_t^2
//   optimal:     -delta_q - <g_q, x*-x_q>/R - (p/2)||g_q||_t^2          (q >= 1)
//   origin:      -delta_0 - <g_0, x*-x_0>/R - (p/2)||g_0||_t^2
// where ||v||_t is the norm of the block-t coordinates.
struct PepSlackReport {
  int block_count = 0;
  int steps = 0;  // M
  std::vector<double> consecutive;  // size M*p, index (q-1)*p + t
  std::vector<double> gap_floor;    // size M*p
  std::vector<double> optimal;      // size M*p
  std::vector<double> origin;       // size p

  struct Finding {
    const char* family = "";
    int flat = 0;   // q
    int block = 0;  // t
    double slack = 0.0;
  };
  Finding worst() const;                // most negative slack over all families
  Finding worst_updated_block() const;  // restricted to t = block updated at step q
  double min_slack() const { return worst().slack; }
  double min_slack_updated_block() const { return worst_updated_block().slack; }
};

PepSlackReport pep_constraint_residuals(const BcdTrace& trace, const QuadraticProblem& p);

// CSV rows "q,k,i,f_gap,grad_norm", one per recorded state.
void write_trace_csv(const BcdTrace& trace, std::ostream& os);

}  // namespace bcdpep
