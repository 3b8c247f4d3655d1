#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bcdpep::linalg {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  std::span<double> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
  std::span<const double> row(int r) const { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  static Matrix identity(int n);

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);  // Euclidean norm
double norm2_squared(std::span<const double> a);
bool all_finite(std::span<const double> a);

// Parallel kernels. Work is split over independent output elements only, so
// results are bitwise identical to the serial reference for any thread count.
void matvec(const Matrix& a, std::span<const double> x, std::span<double> y);            // y = A x
void matvec_transpose(const Matrix& a, std::span<const double> x, std::span<double> y);  // y = A^T x
Matrix gram(const Matrix& a);                                                            // A^T A
// Gram matrix of a contiguous column slice A(:, col0 : col0+ncols).
Matrix gram_slice(const Matrix& a, int col0, int ncols);

// Symmetric eigendecomposition, eigenvalues ascending, eigenvectors in columns.
struct SymEigen {
  Vector values;
  Matrix vectors;
};
// Cyclic Jacobi rotations; input must be symmetric. Handles indefinite and
// boundary-singular matrices where a Cholesky-based route would fail.
SymEigen sym_eigen(const Matrix& a, int max_sweeps = 64);

// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
// deterministic all-ones start, stagnation tolerance on the Rayleigh quotient.
double power_iteration_largest(const Matrix& sym, double tol = 1e-12, int max_iter = 10000);

// LU with partial pivoting.
struct LuFactors {
  Matrix lu;
  std::vector<int> perm;
  int sign = 1;
  bool singular = false;
};
LuFactors lu_factor(const Matrix& a);
Vector lu_solve(const LuFactors& f, std::span<const double> b);
double lu_det(const LuFactors& f);

namespace ref {
// Serial reference implementations kept for testing the parallel kernels.
void matvec(const Matrix& a, std::span<const double> x, std::span<double> y);
void matvec_transpose(const Matrix& a, std::span<const double> x, std::span<double> y);
Matrix gram(const Matrix& a);
SymEigen sym_eigen(const Matrix& a, int max_sweeps = 64);
}  // namespace ref

}  // namespace bcdpep::linalg
