#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bcdpep/linalg.hpp"
#include "bcdpep/rational.hpp"

namespace bcdpep {

// Dual multipliers for the worst-case certificate. Flat index q = kp+i runs
// 1..M over lambda, 0..M over tau, M = (N+1)p. Values are kept as exact
// rationals alongside their double renderings so algebraically equal
// assemblies compare equal bit-for-bit after conversion.
struct MultiplierSchedule {
  int outer_iterations = 0;  // N
  int block_count = 0;       // p
  std::vector<Rational> lambda_exact;  // size M
  std::vector<Rational> tau_exact;     // size M+1
  Rational t_exact;
  std::vector<double> lambda;
  std::vector<double> tau;
  double t = 0.0;

  int steps() const { return (outer_iterations + 1) * block_count; }  // M
};

// The certified schedule: lambda_q = q/(2M+1-q), t = 1/(2M+1), tau from the
// flat-difference identities tau_0 = lambda_1, tau_q = lambda_{q+1}-lambda_q,
// tau_M = 1 - lambda_M.
MultiplierSchedule lambda_schedule(int n_outer, int p);

// Arbitrary multipliers with tau derived by the same identities; sign and
// monotonicity are not validated (used to exercise affine assemblies).
MultiplierSchedule schedule_from_lambda(int n_outer, int p, std::vector<Rational> lambda,
                                        Rational t);

std::vector<Rational> equal_weights(int p);  // p copies of 1/p

struct CertificateMatrix {
  linalg::Matrix two_a;     // order M+1
  linalg::Matrix bordered;  // S = [[2A, tau],[tau^T, t]], order M+2
  std::vector<double> weights;
};

// Row-major (M+1)^2 entries of 2A assembled term-by-term from the weighted
// outer-product sum: per-step lambda terms on the two touched diagonal cells,
// tau diagonal terms, tau cross terms against every earlier step, and the
// initial tau term (whose unbound block weight is taken as block 0).
// weights has length p; the step weight is p*weights[(q-1) mod p].
template <typename T>
std::vector<T> assemble_dual_entries(std::span<const T> lambda, std::span<const T> tau,
                                     std::span<const T> weights);

// The displayed equal-weight entry pattern: diagonal (2*lambda_1, ...,
// 2*lambda_M, 1), entry (a,b) = tau_b for a < b.
template <typename T>
std::vector<T> pattern_dual_entries(std::span<const T> lambda, std::span<const T> tau);

// 2A from the exact outer-product assembly, converted to doubles.
linalg::Matrix build_dual_matrix(const MultiplierSchedule& s, const std::vector<Rational>& weights);
linalg::Matrix pattern_dual_matrix(const MultiplierSchedule& s);

linalg::Matrix assemble_certificate(const linalg::Matrix& two_a, std::span<const double> tau,
                                    double t);
CertificateMatrix build_certificate(const MultiplierSchedule& s,
                                    const std::vector<Rational>& weights);

// PSD verdict by symmetric eigendecomposition: psd iff
// lambda_min >= -tol*(1+||S||_2). Eigen-based because valid certificates sit
// on the PSD boundary, where a plain Cholesky fails spuriously.
struct PsdVerdict {
  bool psd = false;
  double min_eigenvalue = 0.0;
  double spectral_norm = 0.0;
  double margin = 0.0;  // min_eigenvalue + tol*(1+spectral_norm)
};
PsdVerdict psd_check(const linalg::Matrix& s, double tol = 1e-8);

// Sufficient fast pre-screen: true when S + jitter*I admits a Cholesky
// factorization. False is inconclusive.
bool cholesky_prescreen(const linalg::Matrix& s, double jitter = 1e-10);

// Smallest t keeping the bordered matrix PSD: t* = tau^T (2A)^+ tau, valid
// when tau lies in range(2A); outside that range no finite t works.
struct MinFeasibleT {
  bool tau_in_range = false;
  double t_star = 0.0;
  double range_residual = 0.0;  // mass of tau outside range(2A)
};
MinFeasibleT min_feasible_t(const linalg::Matrix& two_a, std::span<const double> tau,
                            double rank_tol = 1e-12);

// Leading principal minors det(2A[0..m-1, 0..m-1]), m = 1..order, each by an
// independent pivoted LU factorization.
std::vector<double> minor_determinants(const linalg::Matrix& two_a);

// Three-term recursion for the minors of the schedule's 2A, orders 1..M (the
// (M+1)-st minor has the constant corner and falls outside the pattern):
//   d_1 = 2 l_1, d_2 = 4 l_1 l_2 - (l_2 - l_1)^2,
//   d_m = alpha_m d_{m-1} - beta_m d_{m-2} with
//   alpha_m = 2 l_m - 2 a^2/b + 2 l_{m-1} a^2/b^2,
//   beta_m  = a^2 (1 - 2 l_{m-1}/b)^2,  a = l_m - l_{m-1},  b = l_{m-1} - l_{m-2}.
struct RecursionCheck {
  std::vector<double> direct;     // LU minors, orders 1..M
  std::vector<double> recursion;  // recursion values, orders 1..M
  double max_abs_error = 0.0;
  double max_abs_det = 0.0;
};
RecursionCheck recursion_check(const MultiplierSchedule& s);

// Closed-form solution of the recursion for the certified schedule,
// order 1 <= q <= M, with P = M:
//   det_q = f_q (1 + g_q sum_{j<q} x_j) prod_{j<q} y_j,
//   f_q = (2P+1)^2/(2P+1-q)^2, g_q = 2P-2q+1,
//   x_j = 1/(2P+4Pj-2j^2+1), y_j = (2P+4Pj-2j^2+1)/(2P+1-j)^2.
double closed_form_minor(int order, int n_outer, int p);

struct ClosedFormCheck {
  double max_rel_error = 0.0;  // |closed - direct| / (1 + |direct|), orders 1..M
};
ClosedFormCheck closed_form_check(const MultiplierSchedule& s);

// Plain text: header "N p M t", lambda row, tau row, then the M+2 rows of S.
void write_certificate(const MultiplierSchedule& s, const CertificateMatrix& c, std::ostream& os);

}  // namespace bcdpep
