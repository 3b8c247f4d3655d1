#include <cmath>
#include <random>

#include "bcdpep/linalg.hpp"
#include "doctest.h"

namespace la = bcdpep::linalg;

namespace {

la::Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  la::Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng);
  return m;
}

la::Matrix random_symmetric(int n, std::uint64_t seed) {
  la::Matrix m = random_matrix(n, n, seed);
  la::Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

}  // namespace

TEST_CASE("matvec and gram against hand values") {
  la::Matrix a(2, 2);
  a(0, 0) = 1.0; a(0, 1) = 2.0;
  a(1, 0) = 3.0; a(1, 1) = 4.0;
  la::Vector x = {1.0, -1.0};
  la::Vector y(2);
  la::matvec(a, x, y);
  CHECK(y[0] == -1.0);
  CHECK(y[1] == -1.0);
  la::matvec_transpose(a, x, y);
  CHECK(y[0] == -2.0);
  CHECK(y[1] == -2.0);

  const la::Matrix g = la::gram(a);
  CHECK(g(0, 0) == 10.0);
  CHECK(g(0, 1) == 14.0);
  CHECK(g(1, 0) == 14.0);
  CHECK(g(1, 1) == 20.0);
}

TEST_CASE("gram_slice equals gram of the column slice") {
  const la::Matrix a = random_matrix(7, 6, 11);
  const la::Matrix full = la::gram(a);
  const la::Matrix part = la::gram_slice(a, 2, 3);
  REQUIRE(part.rows() == 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(part(i, j) == full(2 + i, 2 + j));
}

TEST_CASE("sym_eigen on a known 2x2") {
  la::Matrix s(2, 2);
  s(0, 0) = 2.0; s(0, 1) = 1.0;
  s(1, 0) = 1.0; s(1, 1) = 2.0;
  const la::SymEigen e = la::sym_eigen(s);
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("sym_eigen reconstructs and is orthogonal") {
  const int n = 12;
  const la::Matrix s = random_symmetric(n, 5);
  const la::SymEigen e = la::sym_eigen(s);
  REQUIRE(static_cast<int>(e.values.size()) == n);
  for (int i = 1; i < n; ++i) CHECK(e.values[i - 1] <= e.values[i]);
  // V^T V = I and V diag V^T = S
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double vv = 0.0, rec = 0.0;
      for (int k = 0; k < n; ++k) {
        vv += e.vectors(k, i) * e.vectors(k, j);
        rec += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      }
      CHECK(vv == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
      CHECK(rec == doctest::Approx(s(i, j)).epsilon(1e-9));
    }
  }
}

TEST_CASE("power iteration matches the top eigenvalue") {
  const la::Matrix a = random_matrix(9, 9, 17);
  const la::Matrix g = la::gram(a);  // symmetric PSD
  const double top = la::power_iteration_largest(g);
  const la::SymEigen e = la::sym_eigen(g);
  CHECK(top == doctest::Approx(e.values.back()).epsilon(1e-9));
}

TEST_CASE("lu solve, determinant, and singularity flag") {
  la::Matrix a(2, 2);
  a(0, 0) = 2.0; a(0, 1) = 1.0;
  a(1, 0) = 1.0; a(1, 1) = 3.0;
  const la::LuFactors f = la::lu_factor(a);
  CHECK_FALSE(f.singular);
  CHECK(la::lu_det(f) == doctest::Approx(5.0).epsilon(1e-14));
  const la::Vector x = la::lu_solve(f, std::vector<double>{3.0, 4.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));

  la::Matrix sing(2, 2);
  sing(0, 0) = 1.0; sing(0, 1) = 2.0;
  sing(1, 0) = 2.0; sing(1, 1) = 4.0;
  CHECK(la::lu_factor(sing).singular);

  const la::Matrix big = random_matrix(20, 20, 23);
  const la::LuFactors fb = la::lu_factor(big);
  REQUIRE_FALSE(fb.singular);
  la::Vector rhs(20);
  for (int i = 0; i < 20; ++i) rhs[i] = 1.0 / (1.0 + i);
  const la::Vector sol = la::lu_solve(fb, rhs);
  la::Vector back(20);
  la::matvec(big, sol, back);
  for (int i = 0; i < 20; ++i) CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-9));
}

TEST_CASE("parallel kernels match the serial reference bitwise") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const la::Matrix a = random_matrix(150, 140, seed);
    la::Vector x(140), y_par(150), y_ref(150);
    for (int i = 0; i < 140; ++i) x[static_cast<std::size_t>(i)] = std::sin(i + 1.0);
    la::matvec(a, x, y_par);
    la::ref::matvec(a, x, y_ref);
    CHECK(y_par == y_ref);

    la::Vector xt(150), z_par(140), z_ref(140);
    for (int i = 0; i < 150; ++i) xt[static_cast<std::size_t>(i)] = std::cos(i + 1.0);
    la::matvec_transpose(a, xt, z_par);
    la::ref::matvec_transpose(a, xt, z_ref);
    CHECK(z_par == z_ref);

    CHECK(la::gram(a) == la::ref::gram(a));

    const la::Matrix s = random_symmetric(60, seed + 100);
    const la::SymEigen e_par = la::sym_eigen(s);
    const la::SymEigen e_ref = la::ref::sym_eigen(s);
    CHECK(e_par.values == e_ref.values);
    CHECK(e_par.vectors == e_ref.vectors);
  }
}

TEST_CASE("kernels are deterministic across repeated calls") {
  const la::Matrix a = random_matrix(64, 64, 31);
  CHECK(la::gram(a) == la::gram(a));
  const la::Matrix s = random_symmetric(32, 37);
  const la::SymEigen e1 = la::sym_eigen(s);
  const la::SymEigen e2 = la::sym_eigen(s);
  CHECK(e1.values == e2.values);
  CHECK(e1.vectors == e2.vectors);
}

TEST_CASE("vector helpers") {
  const la::Vector v = {3.0, 4.0};
  CHECK(la::norm2(v) == 5.0);
  CHECK(la::norm2_squared(v) == 25.0);
  CHECK(la::dot(v, v) == 25.0);
  CHECK(la::all_finite(v));
  const la::Vector bad = {1.0, std::nan("")};
  CHECK_FALSE(la::all_finite(bad));
  CHECK(la::Matrix::identity(3)(0, 0) == 1.0);
  CHECK(la::Matrix::identity(3)(0, 1) == 0.0);
}
