#include "bcdpep/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bcdpep::linalg {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2_squared(std::span<const double> a) { return dot(a, a); }

double norm2(std::span<const double> a) { return std::sqrt(norm2_squared(a)); }

bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y) {
  const int m = a.rows();
#pragma omp parallel for if (m >= 128) schedule(static)
  for (int i = 0; i < m; ++i) y[i] = dot(a.row(i), x);
}

void matvec_transpose(const Matrix& a, std::span<const double> x, std::span<double> y) {
  const int m = a.rows(), n = a.cols();
#pragma omp parallel for if (n >= 128) schedule(static)
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += a(k, j) * x[k];
    y[j] = s;
  }
}

Matrix gram(const Matrix& a) { return gram_slice(a, 0, a.cols()); }

Matrix gram_slice(const Matrix& a, int col0, int ncols) {
  if (col0 < 0 || ncols < 0 || col0 + ncols > a.cols())
    throw std::invalid_argument("gram_slice: column range out of bounds");
  const int m = a.rows();
  Matrix c(ncols, ncols);
#pragma omp parallel for if (ncols >= 64) schedule(static)
  for (int i = 0; i < ncols; ++i) {
    for (int j = i; j < ncols; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += a(k, col0 + i) * a(k, col0 + j);
      c(i, j) = s;
      c(j, i) = s;
    }
  }
  return c;
}

namespace {

double offdiag_norm(const Matrix& b) {
  const int n = b.rows();
  double s = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) s += b(r, c) * b(r, c);
  return std::sqrt(2.0 * s);
}

double frobenius(const Matrix& b) {
  double s = 0.0;
  for (double v : b.data()) s += v * v;
  return std::sqrt(s);
}

template <bool Parallel>
SymEigen jacobi_eigen(const Matrix& a, int max_sweeps) {
  const int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("sym_eigen: matrix not square");
  Matrix b = a;
  Matrix v = Matrix::identity(n);
  const double stop = 1e-15 * std::max(frobenius(a), 1.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (offdiag_norm(b) <= stop) break;
    for (int r = 0; r < n - 1; ++r) {
      for (int c = r + 1; c < n; ++c) {
        const double brc = b(r, c);
        if (std::abs(brc) <= 1e-300) {
          b(r, c) = b(c, r) = 0.0;
          continue;
        }
        const double theta = (b(c, c) - b(r, r)) / (2.0 * brc);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        const double brr = b(r, r), bcc = b(c, c);
#pragma omp parallel for if (Parallel && n >= 256) schedule(static)
        for (int k = 0; k < n; ++k) {
          if (k == r || k == c) continue;
          const double br = b(r, k), bc = b(c, k);
          const double nr = cs * br - sn * bc;
          const double nc = sn * br + cs * bc;
          b(r, k) = nr;
          b(c, k) = nc;
          b(k, r) = nr;
          b(k, c) = nc;
        }
        b(r, r) = brr - t * brc;
        b(c, c) = bcc + t * brc;
        b(r, c) = b(c, r) = 0.0;
#pragma omp parallel for if (Parallel && n >= 256) schedule(static)
        for (int k = 0; k < n; ++k) {
          const double vr = v(k, r), vc = v(k, c);
          v(k, r) = cs * vr - sn * vc;
          v(k, c) = sn * vr + cs * vc;
        }
      }
    }
  }
  SymEigen out;
  out.values.resize(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return b(i, i) < b(j, j); });
  out.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = b(order[j], order[j]);
    for (int k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

}  // namespace

SymEigen sym_eigen(const Matrix& a, int max_sweeps) { return jacobi_eigen<true>(a, max_sweeps); }

double power_iteration_largest(const Matrix& sym, double tol, int max_iter) {
  const int n = sym.rows();
  if (n != sym.cols()) throw std::invalid_argument("power_iteration_largest: matrix not square");
  if (n == 0) return 0.0;
  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vector w(n, 0.0);
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    matvec(sym, v, w);
    const double next = dot(v, w);
    const double wn = norm2(w);
    if (wn == 0.0) return 0.0;
    for (int i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

LuFactors lu_factor(const Matrix& a) {
  const int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("lu_factor: matrix not square");
  LuFactors f;
  f.lu = a;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), 0);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(f.lu(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(f.lu(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) {
      f.singular = true;
      continue;
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (int i = k + 1; i < n; ++i) {
      const double m = f.lu(i, k) / f.lu(k, k);
      f.lu(i, k) = m;
      for (int j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
    }
  }
  return f;
}

Vector lu_solve(const LuFactors& f, std::span<const double> b) {
  if (f.singular) throw std::domain_error("lu_solve: singular matrix");
  const int n = f.lu.rows();
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 1; i < n; ++i) {
    double s = x[i];
    for (int j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

double lu_det(const LuFactors& f) {
  if (f.singular) return 0.0;
  double d = static_cast<double>(f.sign);
  for (int i = 0; i < f.lu.rows(); ++i) d *= f.lu(i, i);
  return d;
}

namespace ref {

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y) {
  for (int i = 0; i < a.rows(); ++i) y[i] = linalg::dot(a.row(i), x);
}

void matvec_transpose(const Matrix& a, std::span<const double> x, std::span<double> y) {
  for (int j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (int k = 0; k < a.rows(); ++k) s += a(k, j) * x[k];
    y[j] = s;
  }
}

Matrix gram(const Matrix& a) {
  const int m = a.rows(), n = a.cols();
  Matrix c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += a(k, i) * a(k, j);
      c(i, j) = s;
      c(j, i) = s;
    }
  }
  return c;
}

SymEigen sym_eigen(const Matrix& a, int max_sweeps) { return jacobi_eigen<false>(a, max_sweeps); }

}  // namespace ref

}  // namespace bcdpep::linalg
