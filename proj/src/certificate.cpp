#include "bcdpep/certificate.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bcdpep/format.hpp"

namespace bcdpep {

namespace {

void check_shape(int n_outer, int p) {
  if (n_outer < 0) throw std::invalid_argument("schedule: N must be >= 0");
  if (p < 1) throw std::invalid_argument("schedule: block count must be >= 1");
}

// tau_0 = lambda_1; tau_q = lambda_{q+1} - lambda_q; tau_M = 1 - lambda_M.
std::vector<Rational> tau_from_lambda(const std::vector<Rational>& lambda) {
  const int m = static_cast<int>(lambda.size());
  std::vector<Rational> tau(m + 1);
  tau[0] = lambda[0];
  for (int q = 1; q < m; ++q) tau[q] = lambda[q] - lambda[q - 1];
  tau[m] = Rational(1) - lambda[m - 1];
  return tau;
}

void render_doubles(MultiplierSchedule& s) {
  s.lambda.resize(s.lambda_exact.size());
  s.tau.resize(s.tau_exact.size());
  for (std::size_t i = 0; i < s.lambda_exact.size(); ++i) s.lambda[i] = s.lambda_exact[i].to_double();
  for (std::size_t i = 0; i < s.tau_exact.size(); ++i) s.tau[i] = s.tau_exact[i].to_double();
  s.t = s.t_exact.to_double();
}

}  // namespace

MultiplierSchedule lambda_schedule(int n_outer, int p) {
  check_shape(n_outer, p);
  MultiplierSchedule s;
  s.outer_iterations = n_outer;
  s.block_count = p;
  const std::int64_t m = static_cast<std::int64_t>(n_outer + 1) * p;
  s.lambda_exact.reserve(m);
  for (std::int64_t q = 1; q <= m; ++q) s.lambda_exact.emplace_back(q, 2 * m + 1 - q);
  s.tau_exact = tau_from_lambda(s.lambda_exact);
  s.t_exact = Rational(1, 2 * m + 1);
  render_doubles(s);
  return s;
}

MultiplierSchedule schedule_from_lambda(int n_outer, int p, std::vector<Rational> lambda,
                                        Rational t) {
  check_shape(n_outer, p);
  const std::int64_t m = static_cast<std::int64_t>(n_outer + 1) * p;
  if (static_cast<std::int64_t>(lambda.size()) != m)
    throw std::invalid_argument("schedule_from_lambda: need (N+1)*p multipliers");
  MultiplierSchedule s;
  s.outer_iterations = n_outer;
  s.block_count = p;
  s.lambda_exact = std::move(lambda);
  s.tau_exact = tau_from_lambda(s.lambda_exact);
  s.t_exact = t;
  render_doubles(s);
  return s;
}

std::vector<Rational> equal_weights(int p) {
  if (p < 1) throw std::invalid_argument("equal_weights: block count must be >= 1");
  return std::vector<Rational>(p, Rational(1, p));
}

template <typename T>
std::vector<T> assemble_dual_entries(std::span<const T> lambda, std::span<const T> tau,
                                     std::span<const T> weights) {
  const int m = static_cast<int>(lambda.size());
  const int p = static_cast<int>(weights.size());
  if (static_cast<int>(tau.size()) != m + 1)
    throw std::invalid_argument("assemble_dual_entries: tau must have one more entry than lambda");
  if (p < 1 || m % p != 0)
    throw std::invalid_argument("assemble_dual_entries: weight count must divide step count");
  const int n = m + 1;
  std::vector<T> a(static_cast<std::size_t>(n) * n, T{});
  auto at = [&](int r, int c) -> T& { return a[static_cast<std::size_t>(r) * n + c]; };
  // step coefficient c_q = p * w_{block(q)}; the initial tau term reuses block 0
  std::vector<T> coeff(m + 1);
  coeff[0] = T(p) * weights[0];
  for (int q = 1; q <= m; ++q) coeff[q] = T(p) * weights[(q - 1) % p];

  for (int q = 1; q <= m; ++q) {
    const T lam_term = coeff[q] * lambda[q - 1];
    at(q - 1, q - 1) += lam_term;
    at(q, q) += lam_term;
    at(q, q) += coeff[q] * tau[q];
    for (int qp = 1; qp <= q; ++qp) {
      const T cross = coeff[qp] * tau[q];
      at(qp - 1, q) += cross;
      at(q, qp - 1) += cross;
    }
  }
  at(0, 0) += coeff[0] * tau[0];
  return a;
}

template std::vector<Rational> assemble_dual_entries<Rational>(std::span<const Rational>,
                                                               std::span<const Rational>,
                                                               std::span<const Rational>);
template std::vector<double> assemble_dual_entries<double>(std::span<const double>,
                                                           std::span<const double>,
                                                           std::span<const double>);

template <typename T>
std::vector<T> pattern_dual_entries(std::span<const T> lambda, std::span<const T> tau) {
  const int m = static_cast<int>(lambda.size());
  if (static_cast<int>(tau.size()) != m + 1)
    throw std::invalid_argument("pattern_dual_entries: tau must have one more entry than lambda");
  const int n = m + 1;
  std::vector<T> a(static_cast<std::size_t>(n) * n, T{});
  auto at = [&](int r, int c) -> T& { return a[static_cast<std::size_t>(r) * n + c]; };
  for (int q = 0; q < m; ++q) at(q, q) = T(2) * lambda[q];
  at(m, m) = T(1);
  for (int r = 1; r <= m; ++r)
    for (int q = 0; q < r; ++q) {
      at(q, r) = tau[r];
      at(r, q) = tau[r];
    }
  return a;
}

template std::vector<Rational> pattern_dual_entries<Rational>(std::span<const Rational>,
                                                              std::span<const Rational>);
template std::vector<double> pattern_dual_entries<double>(std::span<const double>,
                                                          std::span<const double>);

namespace {

linalg::Matrix to_matrix(const std::vector<Rational>& entries, int n) {
  linalg::Matrix out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(r, c) = entries[static_cast<std::size_t>(r) * n + c].to_double();
  return out;
}

void check_weights(const std::vector<Rational>& weights) {
  Rational sum(0);
  for (const Rational& w : weights) {
    if (!(Rational(0) < w)) throw std::invalid_argument("weights must be positive");
    sum += w;
  }
  if (sum != Rational(1)) throw std::invalid_argument("weights must sum to 1");
}

}  // namespace

linalg::Matrix build_dual_matrix(const MultiplierSchedule& s, const std::vector<Rational>& weights) {
  check_weights(weights);
  if (static_cast<int>(weights.size()) != s.block_count)
    throw std::invalid_argument("build_dual_matrix: one weight per block required");
  const auto entries =
      assemble_dual_entries<Rational>(s.lambda_exact, s.tau_exact, weights);
  return to_matrix(entries, s.steps() + 1);
}

linalg::Matrix pattern_dual_matrix(const MultiplierSchedule& s) {
  const auto entries = pattern_dual_entries<Rational>(s.lambda_exact, s.tau_exact);
  return to_matrix(entries, s.steps() + 1);
}

linalg::Matrix assemble_certificate(const linalg::Matrix& two_a, std::span<const double> tau,
                                    double t) {
  const int n = two_a.rows();
  if (two_a.cols() != n) throw std::invalid_argument("assemble_certificate: 2A must be square");
  if (static_cast<int>(tau.size()) != n)
    throw std::invalid_argument("assemble_certificate: tau length must match 2A order");
  linalg::Matrix s(n + 1, n + 1);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) s(r, c) = two_a(r, c);
    s(r, n) = tau[r];
    s(n, r) = tau[r];
  }
  s(n, n) = t;
  return s;
}

CertificateMatrix build_certificate(const MultiplierSchedule& s,
                                    const std::vector<Rational>& weights) {
  CertificateMatrix c;
  c.two_a = build_dual_matrix(s, weights);
  c.bordered = assemble_certificate(c.two_a, s.tau, s.t);
  c.weights.reserve(weights.size());
  for (const Rational& w : weights) c.weights.push_back(w.to_double());
  return c;
}

PsdVerdict psd_check(const linalg::Matrix& s, double tol) {
  const linalg::SymEigen eig = linalg::sym_eigen(s);
  PsdVerdict v;
  v.min_eigenvalue = eig.values.front();
  v.spectral_norm = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  v.margin = v.min_eigenvalue + tol * (1.0 + v.spectral_norm);
  v.psd = v.margin >= 0.0;
  return v;
}

bool cholesky_prescreen(const linalg::Matrix& s, double jitter) {
  const int n = s.rows();
  linalg::Matrix l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = s(j, j) + jitter;
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0) return false;
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return true;
}

MinFeasibleT min_feasible_t(const linalg::Matrix& two_a, std::span<const double> tau,
                            double rank_tol) {
  const int n = two_a.rows();
  if (static_cast<int>(tau.size()) != n)
    throw std::invalid_argument("min_feasible_t: tau length must match 2A order");
  const linalg::SymEigen eig = linalg::sym_eigen(two_a);
  const double scale = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  const double cutoff = rank_tol * std::max(scale, 1e-300);
  MinFeasibleT out;
  double outside2 = 0.0;
  for (int j = 0; j < n; ++j) {
    double c = 0.0;
    for (int k = 0; k < n; ++k) c += eig.vectors(k, j) * tau[k];
    if (std::abs(eig.values[j]) <= cutoff) {
      outside2 += c * c;
    } else {
      out.t_star += c * c / eig.values[j];
    }
  }
  out.range_residual = std::sqrt(outside2);
  out.tau_in_range = out.range_residual <= 1e-8 * std::max(1.0, linalg::norm2(tau));
  return out;
}

std::vector<double> minor_determinants(const linalg::Matrix& two_a) {
  const int n = two_a.rows();
  std::vector<double> dets(n);
#pragma omp parallel for if (n >= 32) schedule(dynamic)
  for (int m = 1; m <= n; ++m) {
    linalg::Matrix sub(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) sub(r, c) = two_a(r, c);
    dets[m - 1] = linalg::lu_det(linalg::lu_factor(sub));
  }
  return dets;
}

RecursionCheck recursion_check(const MultiplierSchedule& s) {
  const int m = s.steps();
  const linalg::Matrix two_a = build_dual_matrix(s, equal_weights(s.block_count));
  const std::vector<double> all = minor_determinants(two_a);

  RecursionCheck out;
  out.direct.assign(all.begin(), all.begin() + m);
  out.recursion.resize(m);
  const std::vector<double>& l = s.lambda;
  out.recursion[0] = 2.0 * l[0];
  if (m >= 2) out.recursion[1] = 4.0 * l[0] * l[1] - (l[1] - l[0]) * (l[1] - l[0]);
  for (int k = 3; k <= m; ++k) {
    const double lm = l[k - 1], lm1 = l[k - 2], lm2 = l[k - 3];
    const double a = lm - lm1;
    const double b = lm1 - lm2;
    if (b == 0.0)
      throw std::logic_error("recursion_check: equal consecutive multipliers (schedule not strictly increasing)");
    const double alpha = 2.0 * lm - 2.0 * a * a / b + 2.0 * lm1 * (a * a) / (b * b);
    const double ratio = 1.0 - 2.0 * lm1 / b;
    const double beta = a * a * ratio * ratio;
    out.recursion[k - 1] = alpha * out.recursion[k - 2] - beta * out.recursion[k - 3];
  }
  for (int i = 0; i < m; ++i) {
    out.max_abs_error = std::max(out.max_abs_error, std::abs(out.direct[i] - out.recursion[i]));
    out.max_abs_det = std::max(out.max_abs_det, std::abs(out.direct[i]));
  }
  return out;
}

double closed_form_minor(int order, int n_outer, int p) {
  check_shape(n_outer, p);
  const std::int64_t big_p = static_cast<std::int64_t>(n_outer + 1) * p;
  if (order < 1 || order > big_p)
    throw std::invalid_argument("closed_form_minor: order must lie in 1..(N+1)p");
  const double f = static_cast<double>((2 * big_p + 1) * (2 * big_p + 1)) /
                   static_cast<double>((2 * big_p + 1 - order) * (2 * big_p + 1 - order));
  const double g = static_cast<double>(2 * big_p - 2 * order + 1);
  double sum_x = 0.0, prod_y = 1.0;
  for (std::int64_t j = 0; j < order; ++j) {
    const std::int64_t core = 2 * big_p + 4 * big_p * j - 2 * j * j + 1;
    const std::int64_t den = (2 * big_p + 1 - j) * (2 * big_p + 1 - j);
    sum_x += 1.0 / static_cast<double>(core);
    prod_y *= static_cast<double>(core) / static_cast<double>(den);
  }
  return f * (1.0 + g * sum_x) * prod_y;
}

ClosedFormCheck closed_form_check(const MultiplierSchedule& s) {
  const int m = s.steps();
  const linalg::Matrix two_a = build_dual_matrix(s, equal_weights(s.block_count));
  const std::vector<double> direct = minor_determinants(two_a);
  ClosedFormCheck out;
  for (int q = 1; q <= m; ++q) {
    const double cf = closed_form_minor(q, s.outer_iterations, s.block_count);
    const double rel = std::abs(cf - direct[q - 1]) / (1.0 + std::abs(direct[q - 1]));
    out.max_rel_error = std::max(out.max_rel_error, rel);
  }
  return out;
}

void write_certificate(const MultiplierSchedule& s, const CertificateMatrix& c, std::ostream& os) {
  os << s.outer_iterations << ' ' << s.block_count << ' ' << s.steps() << ' ' << format_g17(s.t)
     << '\n';
  for (std::size_t i = 0; i < s.lambda.size(); ++i) os << (i ? " " : "") << format_g17(s.lambda[i]);
  os << '\n';
  for (std::size_t i = 0; i < s.tau.size(); ++i) os << (i ? " " : "") << format_g17(s.tau[i]);
  os << '\n';
  const int n = c.bordered.rows();
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < n; ++col) os << (col ? " " : "") << format_g17(c.bordered(r, col));
    os << '\n';
  }
}

}  // namespace bcdpep
