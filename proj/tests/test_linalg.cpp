#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "mrmap/linalg.hpp"
#include "test_support.hpp"

using namespace mrmap;
using test_support::from_eigen;
using test_support::random_matrix;
using test_support::random_vector;
using test_support::to_eigen;

namespace {

LinMap dense_map(const Matrix& a) {
  return [a](const Vector& u) { return matvec(a, u); };
}

LinMap normal_map(const Matrix& a, double beta) {
  return [a, beta](const Vector& u) {
    Vector v = matvec_t(a, matvec(a, u));
    axpy(beta, u, v);
    return v;
  };
}

Vector dense_regularized_solve(const Matrix& a, const Vector& b, double beta,
                               const Vector* shift = nullptr) {
  Eigen::MatrixXd A = to_eigen(a);
  Eigen::MatrixXd N = A.transpose() * A;
  N.diagonal().array() += beta;
  Eigen::VectorXd rhs = A.transpose() * to_eigen(b);
  if (shift) rhs += beta * to_eigen(*shift);
  return from_eigen(N.ldlt().solve(rhs).eval());
}

}  // namespace

TEST_CASE("vector kernels") {
  Vector a{1.0, 2.0, 3.0}, b{4.0, -5.0, 6.0};
  CHECK(dot(a, b) == doctest::Approx(12.0));
  CHECK(nrm2(b) == doctest::Approx(std::sqrt(77.0)));
  Vector y = b;
  axpy(2.0, a, y);
  CHECK(y[0] == doctest::Approx(6.0));
  CHECK(y[2] == doctest::Approx(12.0));
  scal(-1.0, y);
  CHECK(y[1] == doctest::Approx(1.0));
  CHECK(vadd(a, b)[1] == doctest::Approx(-3.0));
  CHECK(vsub(a, b)[1] == doctest::Approx(7.0));
  CHECK(all_finite(a));
  Vector bad{1.0, std::nan("")};
  CHECK_FALSE(all_finite(bad));
  CHECK_THROWS(dot(a, Vector{1.0}));
}

TEST_CASE("matrix kernels against Eigen") {
  RngStream rng(11, 0);
  Matrix m = random_matrix(4, 6, rng);
  Vector x = random_vector(6, rng);
  Vector y = random_vector(4, rng);
  Eigen::VectorXd mx = to_eigen(m) * to_eigen(x);
  Eigen::VectorXd mty = to_eigen(m).transpose() * to_eigen(y);
  Vector got = matvec(m, x);
  Vector got_t = matvec_t(m, y);
  for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(mx(i)).epsilon(1e-14));
  for (int j = 0; j < 6; ++j) CHECK(got_t[j] == doctest::Approx(mty(j)).epsilon(1e-14));

  Matrix o(4, 6);
  outer_acc(o, y, x, 2.5);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) CHECK(o(i, j) == doctest::Approx(2.5 * y[i] * x[j]));
}

TEST_CASE("cg solves small SPD systems exactly within n iterations") {
  RngStream rng(3, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(7));
    Matrix a = random_matrix(n, n, rng);
    Vector b = random_vector(n, rng);
    const double beta = 0.5;
    Vector rhs = matvec_t(a, b);
    axpy(0.0, rhs, rhs);
    Vector x = cg_spd(normal_map(a, beta), rhs, n + 2, 0.0);
    Vector expect = dense_regularized_solve(a, b, beta);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(expect[i]).epsilon(1e-8));
  }
}

TEST_CASE("cg residual trace is consistent and shrinks overall") {
  RngStream rng(5, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(15));
    Matrix a = random_matrix(n, n, rng);
    Vector rhs = random_vector(n, rng);
    CgTrace trace;
    cg_spd(normal_map(a, 0.3), rhs, n, 0.0, &trace);
    REQUIRE(trace.iters >= 1);
    // rho_k = ||r_k||^2 must match the recorded residuals and shrink overall;
    // a generous extra iteration budget then drives the residual down hard.
    for (int k = 0; k <= trace.iters; ++k)
      CHECK(trace.rho[k] == doctest::Approx(dot(trace.r[k], trace.r[k])));
    CHECK(trace.rho.back() < trace.rho.front());
    LinMap M = normal_map(a, 0.3);
    Vector x = cg_spd(M, rhs, 6 * n, 0.0);
    Vector resid = vsub(M(x), rhs);
    CHECK(nrm2(resid) <= 1e-8 * (1.0 + nrm2(rhs)));
  }
}

TEST_CASE("cg_spd_backward matches finite differences for the rhs") {
  RngStream rng(7, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(4));
    Matrix a = random_matrix(n, n, rng);
    LinMap M = normal_map(a, 0.4);
    Vector rhs = random_vector(n, rng);
    Vector c = random_vector(n, rng);  // scalar objective c . x(rhs)
    const int iters = 3;               // deliberately truncated

    CgTrace trace;
    cg_spd(M, rhs, iters, 0.0, &trace);
    Vector rhsbar = cg_spd_backward(M, trace, c, [](const Vector&, const Vector&) {});

    const double eps = 1e-6;
    for (int i = 0; i < n; ++i) {
      Vector rp = rhs, rm = rhs;
      rp[i] += eps;
      rm[i] -= eps;
      const double fp = dot(c, cg_spd(M, rp, iters, 0.0));
      const double fm = dot(c, cg_spd(M, rm, iters, 0.0));
      const double fd = (fp - fm) / (2.0 * eps);
      CHECK(rhsbar[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("cg_spd_backward operator callback carries the operator adjoint") {
  // M_s(u) = (A^T A + s I) u; the derivative of c.x(rhs) in s equals
  // sum_k pbar-channel contributions because dM/ds = I.
  RngStream rng(9, 0);
  const int n = 5;
  Matrix a = random_matrix(n, n, rng);
  Vector rhs = random_vector(n, rng);
  Vector c = random_vector(n, rng);
  const int iters = 3;
  double s = 0.7;
  auto make_map = [&](double sv) { return normal_map(a, sv); };

  CgTrace trace;
  cg_spd(make_map(s), rhs, iters, 0.0, &trace);
  double ds_grad = 0.0;
  cg_spd_backward(make_map(s), trace, c,
                  [&](const Vector& p, const Vector& qbar) { ds_grad += dot(p, qbar); });

  const double eps = 1e-6;
  const double fp = dot(c, cg_spd(make_map(s + eps), rhs, iters, 0.0));
  const double fm = dot(c, cg_spd(make_map(s - eps), rhs, iters, 0.0));
  CHECK(ds_grad == doctest::Approx((fp - fm) / (2.0 * eps)).epsilon(1e-6));
}

TEST_CASE("solve_regularized hand cases") {
  Matrix eye2 = Matrix::identity(2);
  LinMap id = dense_map(eye2);
  Vector u = solve_regularized(id, id, Vector{2.0, 4.0}, 1.0);
  CHECK(u[0] == doctest::Approx(1.0));
  CHECK(u[1] == doctest::Approx(2.0));

  Matrix d21(2, 2);
  d21(0, 0) = 2.0;
  d21(1, 1) = 1.0;
  Vector u2 = solve_regularized(dense_map(d21), dense_map(d21), Vector{5.0, 2.0}, 1.0);
  CHECK(u2[0] == doctest::Approx(2.0));
  CHECK(u2[1] == doctest::Approx(1.0));

  Matrix eye3 = Matrix::identity(3);
  LinMap id3 = dense_map(eye3);
  Vector u3 = solve_regularized(id3, id3, Vector{0.0, 0.0, 0.0}, 0.5);
  CHECK(nrm2(u3) == doctest::Approx(0.0));
}

TEST_CASE("solve_regularized_shifted hand cases") {
  Matrix eye2 = Matrix::identity(2);
  LinMap id = dense_map(eye2);
  Vector u = solve_regularized_shifted(id, id, Vector{0.0, 0.0}, 1.0, Vector{3.0, 5.0});
  CHECK(u[0] == doctest::Approx(1.5));
  CHECK(u[1] == doctest::Approx(2.5));

  Matrix d21(2, 2);
  d21(0, 0) = 2.0;
  d21(1, 1) = 1.0;
  Vector u2 =
      solve_regularized_shifted(dense_map(d21), dense_map(d21), Vector{5.0, 2.0}, 1.0,
                                Vector{1.0, 1.0});
  CHECK(u2[0] == doctest::Approx(2.2));
  CHECK(u2[1] == doctest::Approx(1.5));

  // Zero shift reduces to the unshifted solver bitwise.
  RngStream rng(13, 0);
  Matrix a = test_support::random_matrix(3, 3, rng);
  Vector b = test_support::random_vector(3, rng);
  Vector plain = solve_regularized(dense_map(a), [a](const Vector& y) { return matvec_t(a, y); },
                                   b, 0.7);
  Vector shifted = solve_regularized_shifted(
      dense_map(a), [a](const Vector& y) { return matvec_t(a, y); }, b, 0.7, Vector(3, 0.0));
  for (int i = 0; i < 3; ++i) CHECK(plain[i] == shifted[i]);
}

TEST_CASE("solve_regularized matches dense oracle on random systems") {
  RngStream rng(17, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(15));
    Matrix a = random_matrix(n, n, rng);
    Vector b = random_vector(n, rng);
    Vector shift = random_vector(n, rng);
    const double beta = 0.3;
    auto at = [a](const Vector& y) { return matvec_t(a, y); };
    Vector rhs = matvec_t(a, b);
    const double tol = 1e-13 * (1.0 + nrm2(rhs));
    Vector u = solve_regularized(dense_map(a), at, b, beta, 400, tol);
    Vector us = solve_regularized_shifted(dense_map(a), at, b, beta, shift, 400, tol);
    Vector expect = dense_regularized_solve(a, b, beta);
    Vector expect_s = dense_regularized_solve(a, b, beta, &shift);
    const double scale = nrm2(expect) + 1e-12;
    CHECK(nrm2(vsub(u, expect)) / scale <= 1e-8);
    CHECK(nrm2(vsub(us, expect_s)) / (nrm2(expect_s) + 1e-12) <= 1e-8);
  }
}
