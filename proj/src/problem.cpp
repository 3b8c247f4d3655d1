#include "bcdpep/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bcdpep/format.hpp"

namespace bcdpep {

double QuadraticProblem::objective(std::span<const double> x) const {
  const int d = dimension();
  linalg::Vector r(d);
  linalg::matvec(design, x, r);
  for (int i = 0; i < d; ++i) r[i] -= rhs[i];
  return 0.5 * linalg::norm2_squared(r);
}

double QuadraticProblem::objective_gap(std::span<const double> x) const {
  return objective(x) - optimal_value;
}

void QuadraticProblem::gradient(std::span<const double> x, std::span<double> out) const {
  const int d = dimension();
  linalg::Vector r(d);
  linalg::matvec(design, x, r);
  for (int i = 0; i < d; ++i) r[i] -= rhs[i];
  linalg::matvec_transpose(design, r, out);
}

double QuadraticProblem::max_block_smoothness() const {
  return *std::max_element(block_smoothness.begin(), block_smoothness.end());
}

double block_smoothness(const QuadraticProblem& p, int block) {
  const int off = p.partition.block_offset(block);
  const int sz = p.partition.block_size(block);
  return linalg::power_iteration_largest(linalg::gram_slice(p.design, off, sz));
}

QuadraticProblem make_problem(linalg::Matrix a, linalg::Vector b, BlockPartition partition,
                              std::uint64_t seed) {
  if (a.rows() != a.cols()) throw std::invalid_argument("make_problem: design matrix not square");
  if (static_cast<int>(b.size()) != a.rows())
    throw std::invalid_argument("make_problem: rhs size does not match design");
  if (partition.total_dim() != a.cols())
    throw std::invalid_argument("make_problem: partition dimension does not match design");
  QuadraticProblem p;
  p.design = std::move(a);
  p.rhs = std::move(b);
  p.partition = std::move(partition);
  p.seed = seed;

  const linalg::Matrix g = linalg::gram(p.design);
  p.global_smoothness = linalg::power_iteration_largest(g);
  const linalg::SymEigen eig = linalg::sym_eigen(g);
  p.sigma_min = std::sqrt(std::max(eig.values.front(), 0.0));

  const linalg::LuFactors f = linalg::lu_factor(p.design);
  if (f.singular) throw std::invalid_argument("make_problem: singular design matrix");
  p.minimizer = linalg::lu_solve(f, p.rhs);
  p.optimal_value = p.objective(p.minimizer);

  p.block_smoothness.resize(p.partition.block_count());
  for (int i = 0; i < p.partition.block_count(); ++i) p.block_smoothness[i] = block_smoothness(p, i);
  return p;
}

namespace {

// Deterministic standard-normal stream: Box-Muller over mt19937_64 uniforms.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double u2 = unit();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  double unit() {
    return static_cast<double>(rng_()) * 0x1.0p-64;  // [0, 1)
  }
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

QuadraticProblem random_least_squares(int dim, int blocks, std::uint64_t seed, double min_sigma) {
  BlockPartition part = BlockPartition::equal(dim, blocks);
  GaussianStream gs(seed);
  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    linalg::Matrix a(dim, dim);
    for (double& v : a.data()) v = gs.next();
    linalg::Vector b(dim);
    for (double& v : b) v = gs.next();
    const linalg::SymEigen eig = linalg::sym_eigen(linalg::gram(a));
    const double smin = std::sqrt(std::max(eig.values.front(), 0.0));
    if (smin >= min_sigma) return make_problem(std::move(a), std::move(b), std::move(part), seed);
  }
  throw std::runtime_error("random_least_squares: no well-conditioned draw within attempt budget");
}

double level_radius(const QuadraticProblem& p, std::span<const double> x0) {
  if (p.sigma_min <= 0.0) throw std::domain_error("level_radius: singular design matrix");
  return std::sqrt(2.0 * p.objective(x0)) / p.sigma_min;
}

double block_descent_residual(const QuadraticProblem& p, std::span<const double> x,
                              std::span<const double> y, int block) {
  const int d = p.dimension();
  const int off = p.partition.block_offset(block);
  const int sz = p.partition.block_size(block);
  linalg::Vector gx(d), gy(d), diff(d);
  p.gradient(x, gx);
  p.gradient(y, gy);
  for (int i = 0; i < d; ++i) diff[i] = y[i] - x[i];
  double gnorm2 = 0.0;
  for (int i = off; i < off + sz; ++i) {
    const double gd = gy[i] - gx[i];
    gnorm2 += gd * gd;
  }
  return p.objective(y) - p.objective(x) - linalg::dot(gx, diff) -
         gnorm2 / (2.0 * p.block_smoothness[block]);
}

namespace {

// Pseudoinverse application y = M^+ v through a symmetric eigendecomposition.
linalg::Vector pinv_apply(const linalg::SymEigen& eig, std::span<const double> v, double cutoff) {
  const int n = static_cast<int>(eig.values.size());
  linalg::Vector y(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (std::abs(eig.values[j]) <= cutoff) continue;
    double c = 0.0;
    for (int k = 0; k < n; ++k) c += eig.vectors(k, j) * v[k];
    c /= eig.values[j];
    for (int k = 0; k < n; ++k) y[k] += c * eig.vectors(k, j);
  }
  return y;
}

double max_abs_eigenvalue(const linalg::SymEigen& eig) {
  if (eig.values.empty()) return 0.0;
  return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

}  // namespace

double QuadraticFormInfimum::gap() const { return std::abs(matrix_infimum - vector_infimum); }

QuadraticFormInfimum quadratic_form_infima(const linalg::Matrix& a_quad,
                                           const linalg::Matrix& b_quad,
                                           std::span<const double> a_lin,
                                           std::span<const double> b_lin, double tol) {
  const int m = static_cast<int>(b_lin.size());
  const int n = static_cast<int>(a_lin.size());
  if (a_quad.rows() != m || a_quad.cols() != m)
    throw std::invalid_argument("quadratic_form_infima: a_quad must be m x m with m = dim(b_lin)");
  if (b_quad.rows() != n || b_quad.cols() != n)
    throw std::invalid_argument("quadratic_form_infima: b_quad must be n x n with n = dim(a_lin)");

  QuadraticFormInfimum out;
  const linalg::SymEigen ea = linalg::sym_eigen(a_quad);
  const linalg::SymEigen eb = linalg::sym_eigen(b_quad);
  const double na = max_abs_eigenvalue(ea);
  const double nb = max_abs_eigenvalue(eb);
  if (!ea.values.empty() && ea.values.front() < -tol * (1.0 + na))
    throw std::invalid_argument("quadratic_form_infima: a_quad not positive semidefinite");
  if (!eb.values.empty() && eb.values.front() < -tol * (1.0 + nb))
    throw std::invalid_argument("quadratic_form_infima: b_quad not positive semidefinite");
  const double cut_a = tol * std::max(na, 1.0);
  const double cut_b = tol * std::max(nb, 1.0);

  // Matrix route: stationary X^T = -A^+ b a^T B^+, valid iff b in range(A)
  // and a in range(B); otherwise the objective is unbounded below.
  const linalg::Vector apb = pinv_apply(ea, b_lin, cut_a);   // A^+ b
  const linalg::Vector bpa = pinv_apply(eb, a_lin, cut_b);   // B^+ a
  linalg::Vector resid_b(m), resid_a(n);
  linalg::matvec(a_quad, apb, resid_b);
  linalg::matvec(b_quad, bpa, resid_a);
  double rb = 0.0, ra = 0.0;
  for (int i = 0; i < m; ++i) rb = std::max(rb, std::abs(resid_b[i] - b_lin[i]));
  for (int i = 0; i < n; ++i) ra = std::max(ra, std::abs(resid_a[i] - a_lin[i]));
  const bool b_in_range = rb <= tol * (1.0 + linalg::norm2(b_lin));
  const bool a_in_range = ra <= tol * (1.0 + linalg::norm2(a_lin));
  // The linear term is the outer product b a^T; if either factor vanishes the
  // objective has no linear part and is bounded with infimum 0.
  const bool linear_term_vanishes =
      linalg::norm2(a_lin) <= tol || linalg::norm2(b_lin) <= tol;
  out.matrix_bounded = linear_term_vanishes || (b_in_range && a_in_range);
  if (out.matrix_bounded) {
    // inf = trace(b a^T Xbar) with Xbar^T = -A^+ b a^T B^+
    //     = -(b^T A^+ b)(a^T B^+ a)
    out.matrix_infimum =
        linear_term_vanishes ? 0.0 : -linalg::dot(b_lin, apb) * linalg::dot(a_lin, bpa);
  }

  // Vector route: X = xi b^T gives f = (b^T A b)(xi^T B xi) + 2 ||b||^2 a^T xi.
  const double bab = [&] {
    linalg::Vector ab(m);
    linalg::matvec(a_quad, b_lin, ab);
    return linalg::dot(b_lin, ab);
  }();
  const double bn2 = linalg::norm2_squared(b_lin);
  const double an = linalg::norm2(a_lin);
  if (bab > tol * (1.0 + na) * (1.0 + bn2)) {
    // Stationary xi = -(||b||^2 / (b^T A b)) B^+ a, valid iff a in range(B).
    out.vector_bounded = a_in_range;
    if (out.vector_bounded) {
      const double scale = bn2 / bab;
      // f(xi) = -(||b||^4 / (b^T A b)) a^T B^+ a
      out.vector_infimum = -scale * bn2 * linalg::dot(a_lin, bpa);
    }
  } else {
    // Quadratic term vanishes along this restriction; linear term must too.
    out.vector_bounded = an <= tol;
    out.vector_infimum = 0.0;
  }
  return out;
}

void write_problem(const QuadraticProblem& p, std::ostream& os) {
  const int d = p.dimension();
  os << d << ' ' << p.partition.block_count() << ' ' << p.seed << '\n';
  for (int i = 0; i < d; ++i) {
    const auto row = p.design.row(i);
    for (int j = 0; j < d; ++j) os << (j ? " " : "") << format_g17(row[j]);
    os << '\n';
  }
  for (int j = 0; j < d; ++j) os << (j ? " " : "") << format_g17(p.rhs[j]);
  os << '\n';
}

void write_problem_file(const QuadraticProblem& p, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_problem_file: cannot open " + path);
  write_problem(p, os);
}

QuadraticProblem read_problem(std::istream& is) {
  int d = 0, blocks = 0;
  std::uint64_t seed = 0;
  if (!(is >> d >> blocks >> seed))
    throw std::runtime_error("read_problem: malformed header, expected 'dim blocks seed'");
  if (d <= 0 || blocks <= 0) throw std::runtime_error("read_problem: nonpositive dimensions in header");
  linalg::Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (!(is >> a(i, j)))
        throw std::runtime_error("read_problem: truncated design row " + std::to_string(i));
  linalg::Vector b(d);
  for (int j = 0; j < d; ++j)
    if (!(is >> b[j])) throw std::runtime_error("read_problem: truncated rhs row");
  return make_problem(std::move(a), std::move(b), BlockPartition::equal(d, blocks), seed);
}

QuadraticProblem read_problem_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_problem_file: cannot open " + path);
  return read_problem(is);
}

}  // namespace bcdpep
