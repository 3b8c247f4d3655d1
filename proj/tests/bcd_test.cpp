#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "bcdpep/bcd.hpp"
#include "bcdpep/linalg.hpp"
#include "bcdpep/partition.hpp"
#include "bcdpep/problem.hpp"
#include "doctest.h"

using namespace bcdpep;

namespace {

QuadraticProblem identity_problem(int dim, int blocks, linalg::Vector rhs) {
  linalg::Matrix a = linalg::Matrix::identity(dim);
  return make_problem(std::move(a), std::move(rhs), BlockPartition::equal(dim, blocks));
}

linalg::Vector random_start(int dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  linalg::Vector x(dim);
  for (double& v : x) v = normal(gen);
  return x;
}

}  // namespace

TEST_CASE("isotropic objective converges in one cycle") {
  QuadraticProblem prob = identity_problem(2, 2, {0.0, 0.0});
  const BcdTrace tr = run_cyclic_bcd(prob, std::vector<double>{1.0, 1.0}, 0);
  REQUIRE(tr.steps() == 2);
  CHECK(tr.objective_gaps[0] == 1.0);
  CHECK(tr.objective_gaps[1] == 0.5);
  CHECK(tr.objective_gaps[2] == 0.0);
  CHECK(tr.point(2)[0] == 0.0);
  CHECK(tr.point(2)[1] == 0.0);
  CHECK_FALSE(tr.unequal_smoothness);
}

TEST_CASE("separable blocks solve exactly after the first cycle") {
  QuadraticProblem prob = identity_problem(4, 2, {3.0, 4.0, 1.0, 2.0});
  const linalg::Vector x0(4, 0.0);
  const BcdTrace tr = run_cyclic_bcd(prob, x0, 2);
  REQUIRE(tr.steps() == 6);
  // Each block update lands on the matching slice of b up to one rounding of
  // the estimated step constant (the eigenvalue estimate for an identity block
  // is within one ulp of 1, not exactly 1), so gaps collapse to roundoff scale
  // after the first cycle instead of to exact zero.
  for (int q = 2; q <= 6; ++q) {
    CHECK(tr.objective_gaps[q] >= 0.0);
    CHECK(tr.objective_gaps[q] <= 1e-25);
  }
  for (int j = 0; j < 4; ++j) CHECK(tr.point(6)[j] == doctest::Approx(prob.minimizer[j]).epsilon(1e-13));
}

TEST_CASE("hand-checked two-block trace") {
  // f(x) = 0.5 x^T Q x with Q = [[2,1],[1,2]] realized as A = chol(Q)^T:
  // A = [[sqrt 2, 1/sqrt 2], [0, sqrt(3/2)]], b = 0, unit blocks, L_i = 2.
  const double r2 = std::sqrt(2.0);
  linalg::Matrix a(2, 2);
  a(0, 0) = r2;
  a(0, 1) = 1.0 / r2;
  a(1, 0) = 0.0;
  a(1, 1) = std::sqrt(1.5);
  QuadraticProblem prob = make_problem(a, {0.0, 0.0}, BlockPartition::equal(2, 2));
  CHECK(prob.block_smoothness[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(prob.block_smoothness[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(prob.optimal_value == 0.0);

  const BcdTrace tr = run_cyclic_bcd(prob, std::vector<double>{1.0, 1.0}, 0);
  REQUIRE(tr.steps() == 2);
  // x0 = (1,1), grad = Qx = (3,3); block 0: x -> (1 - 3/2, 1) = (-1/2, 1);
  // grad = (0, 3/2); block 1: x -> (-1/2, 1 - 3/4) = (-1/2, 1/4).
  CHECK(tr.point(1)[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(tr.point(1)[1] == 1.0);
  CHECK(tr.point(2)[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(tr.point(2)[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(tr.objective_gaps[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(tr.objective_gaps[1] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(tr.objective_gaps[2] == doctest::Approx(0.1875).epsilon(1e-12));
  CHECK(tr.radius == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
  CHECK(tr.minimizer[0] == 0.0);
  CHECK(tr.minimizer[1] == 0.0);

  const PepSlackReport rep = pep_constraint_residuals(tr, prob);
  CHECK(rep.min_slack() >= -1e-12);
  CHECK(rep.min_slack_updated_block() >= rep.min_slack());
}

TEST_CASE("trace layout and flat indexing") {
  QuadraticProblem prob = random_least_squares(12, 3, 7);
  const BcdTrace tr = run_cyclic_bcd(prob, random_start(12, 11), 4);
  CHECK(tr.outer_iterations == 4);
  CHECK(tr.block_count == 3);
  CHECK(tr.steps() == 15);
  CHECK(tr.points.rows() == 16);
  CHECK(tr.points.cols() == 12);
  CHECK(tr.gradients.rows() == 16);
  CHECK(static_cast<int>(tr.objective_gaps.size()) == 16);
  CHECK(tr.common_smoothness == prob.max_block_smoothness());
  for (int q = 1; q <= tr.steps(); ++q) {
    const FlatIndex ix = unflatten(q, 3);
    CHECK(flatten(ix.outer, ix.inner, 3) == q);
    CHECK(updated_block(q, 3) == (q - 1) % 3);
  }
  // End of cycle k and start of cycle k+1 are one recorded state: q = (k+1)*p.
  CHECK(flatten(0, 3, 3) == flatten(1, 0, 3));
}

TEST_CASE("objective gaps decrease along every trace") {
  for (int p : {2, 5}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      QuadraticProblem prob = random_least_squares(20, p, seed);
      const BcdTrace tr = run_cyclic_bcd(prob, random_start(20, seed + 100), 10);
      const double tol = 1e-12 * (1.0 + tr.objective_gaps[0]);
      for (int q = 1; q <= tr.steps(); ++q)
        CHECK(tr.objective_gaps[q] <= tr.objective_gaps[q - 1] + tol);
      CHECK(tr.objective_gaps[tr.steps()] < tr.objective_gaps[0]);
    }
  }
}

TEST_CASE("interpolation slacks stay nonnegative on generated instances") {
  double worst_full = 0.0;
  double worst_updated = 0.0;
  for (int p : {2, 5}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      QuadraticProblem prob = random_least_squares(20, p, seed);
      const BcdTrace tr = run_cyclic_bcd(prob, random_start(20, seed + 500), 10);
      const PepSlackReport rep = pep_constraint_residuals(tr, prob);
      const auto full = rep.worst();
      const auto updated = rep.worst_updated_block();
      worst_full = std::min(worst_full, full.slack);
      worst_updated = std::min(worst_updated, updated.slack);
      CHECK(updated.slack >= full.slack);  // restricted family is a subset
      // Report sizes: one slack per (step, block) pair plus the origin row.
      const std::size_t expected = static_cast<std::size_t>(rep.steps) * rep.block_count;
      CHECK(rep.consecutive.size() == expected);
      CHECK(rep.gap_floor.size() == expected);
      CHECK(rep.optimal.size() == expected);
      CHECK(rep.origin.size() == static_cast<std::size_t>(rep.block_count));
    }
  }
  CHECK(worst_full >= -1e-9);
  CHECK(worst_updated >= -1e-9);
}

TEST_CASE("stationary start produces a zero-radius trace") {
  QuadraticProblem prob = identity_problem(2, 2, {1.0, 2.0});
  const std::vector<double> x0 = {1.0, 2.0};  // the minimizer, exactly
  const BcdTrace tr = run_cyclic_bcd(prob, x0, 1);
  CHECK(tr.radius == 0.0);
  for (int q = 0; q <= tr.steps(); ++q) {
    CHECK(tr.objective_gaps[q] == 0.0);
    CHECK(linalg::norm2(tr.gradient(q)) == 0.0);
    CHECK(tr.point(q)[0] == 1.0);
    CHECK(tr.point(q)[1] == 2.0);
  }
  // Normalized constraint slacks need a positive radius.
  CHECK_THROWS_AS(pep_constraint_residuals(tr, prob), std::invalid_argument);
}

TEST_CASE("trace csv golden output") {
  QuadraticProblem prob = identity_problem(2, 2, {3.0, 4.0});
  const BcdTrace tr = run_cyclic_bcd(prob, std::vector<double>{0.0, 0.0}, 0);
  std::ostringstream os;
  write_trace_csv(tr, os);
  CHECK(os.str() ==
        "q,k,i,f_gap,grad_norm\n"
        "0,0,0,12.5,5\n"
        "1,0,1,8,4\n"
        "2,0,2,0,0\n");
}

TEST_CASE("argument validation and nonfinite abort") {
  QuadraticProblem prob = identity_problem(2, 2, {3.0, 4.0});
  const std::vector<double> x0 = {0.0, 0.0};
  CHECK_THROWS_AS(run_cyclic_bcd(prob, x0, -1), std::invalid_argument);
  CHECK_THROWS_AS(run_cyclic_bcd(prob, std::vector<double>{1.0}, 0), std::invalid_argument);
  QuadraticProblem blank;
  CHECK_THROWS_AS(run_cyclic_bcd(blank, std::vector<double>{}, 0), std::invalid_argument);

  // Corrupted step constants make the iterate overflow; the runner must stop
  // with a diagnostic instead of recording nonfinite states.
  QuadraticProblem broken = identity_problem(2, 2, {3.0, 4.0});
  broken.block_smoothness[0] = 1e-300;
  broken.block_smoothness[1] = 1e-300;
  CHECK_THROWS_AS(run_cyclic_bcd(broken, x0, 3), std::runtime_error);
}
