#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "bcdpep/linalg.hpp"
#include "bcdpep/partition.hpp"

namespace bcdpep {

// Least-squares objective f(x) = 0.5*||A x - b||^2 with a block partition of
// the variables and cached smoothness data.
struct QuadraticProblem {
  linalg::Matrix design;  // A, square
  linalg::Vector rhs;     // b
  BlockPartition partition;
  std::uint64_t seed = 0;  // generator seed, 0 for handmade instances

  // Cached by make_problem:
  std::vector<double> block_smoothness;  // L_i = lambda_max(A_i^T A_i)
  double global_smoothness = 0.0;        // L = lambda_max(A^T A)
  double sigma_min = 0.0;                // smallest singular value of A
  linalg::Vector minimizer;              // x* with A x* = b
  double optimal_value = 0.0;            // f(x*)

  int dimension() const { return design.cols(); }
  double objective(std::span<const double> x) const;
  double objective_gap(std::span<const double> x) const;  // f(x) - f(x*)
  void gradient(std::span<const double> x, std::span<double> out) const;
  double max_block_smoothness() const;
};

// Validates shapes, requires A nonsingular, fills the cached fields.
QuadraticProblem make_problem(linalg::Matrix a, linalg::Vector b, BlockPartition partition,
                              std::uint64_t seed = 0);

// Standard-normal A and b from a seeded mt19937_64 / Box-Muller stream,
// redrawn until sigma_min(A) >= min_sigma (bounded attempts).
QuadraticProblem random_least_squares(int dim, int blocks, std::uint64_t seed,
                                      double min_sigma = 1e-3);

// Largest eigenvalue of A_i^T A_i by power iteration on the column-slice Gram
// matrix; the per-block gradient step 1/L_i uses exactly this value.
double block_smoothness(const QuadraticProblem& p, int block);

// Radius bound R(x0) = sqrt(2 f(x0)) / sigma_min(A) on ||x - x*|| over the
// initial level set.
double level_radius(const QuadraticProblem& p, std::span<const double> x0);

// Block descent residual
//   f(y) - f(x) - <grad f(x), y - x> - 1/(2 L_i) ||grad_i f(y) - grad_i f(x)||^2,
// nonnegative for quadratics when y - x is supported on block i.
double block_descent_residual(const QuadraticProblem& p, std::span<const double> x,
                              std::span<const double> y, int block);

// Infimum of f(X) = trace(A X^T B X + 2 b a^T X) over X (matrix route) and
// over the rank-one restriction X = xi b^T (vector route). a_quad is the
// m x m coefficient A with m = dim(b_lin); b_quad is n x n with n = dim(a_lin).
// The restriction can only raise the infimum; the two coincide exactly when
// b is an eigenvector of a_quad (or a degenerate term vanishes).
struct QuadraticFormInfimum {
  bool matrix_bounded = false;
  bool vector_bounded = false;
  double matrix_infimum = 0.0;
  double vector_infimum = 0.0;
  double gap() const;  // |matrix_infimum - vector_infimum|
};
QuadraticFormInfimum quadratic_form_infima(const linalg::Matrix& a_quad,
                                           const linalg::Matrix& b_quad,
                                           std::span<const double> a_lin,
                                           std::span<const double> b_lin,
                                           double tol = 1e-9);

// Text round trip: "D p seed" header, D design rows, one rhs row, %.17g.
void write_problem(const QuadraticProblem& p, std::ostream& os);
void write_problem_file(const QuadraticProblem& p, const std::string& path);
QuadraticProblem read_problem(std::istream& is);
QuadraticProblem read_problem_file(const std::string& path);

}  // namespace bcdpep
