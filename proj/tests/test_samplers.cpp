#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mrmap/samplers.hpp"
#include "test_support.hpp"

using namespace mrmap;

TEST_CASE("RngStream determinism and stream independence") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool identical = true, differs = false;
  for (int i = 0; i < 100; ++i) {
    const uint64_t va = a.next_u64();
    identical = identical && (va == b.next_u64());
    differs = differs || (va != c.next_u64());
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("RngStream uniform and normal moments") {
  RngStream rng(1, 0);
  const int n = 100000;
  double umean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    umean += u;
  }
  CHECK(umean / n == doctest::Approx(0.5).epsilon(0.01));

  double zmean = 0.0, z2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    zmean += z;
    z2 += z * z;
  }
  CHECK(zmean / n == doctest::Approx(0.0).epsilon(1.0).scale(0.02));
  CHECK(z2 / n == doctest::Approx(1.0).epsilon(0.02));

  for (int i = 0; i < 1000; ++i) CHECK(rng.next_below(7) < 7);
  CHECK(rng.next_double_open() > 0.0);
}

TEST_CASE("default hexagon mixture geometry") {
  MixtureSpec spec = MixtureSpec::default_hexagon();
  REQUIRE(spec.means.size() == 6);
  CHECK(spec.dim() == 2);
  for (const Vector& mu : spec.means) CHECK(nrm2(mu) == doctest::Approx(8.0));
}

TEST_CASE("sample_mixture: balance, single-component mean, determinism") {
  MixtureSpec spec = MixtureSpec::default_hexagon();
  RngStream rng(2, 0);
  Matrix x = sample_mixture(spec, 600, rng);
  std::vector<int> counts(6, 0);
  for (int c = 0; c < 600; ++c) {
    Vector pt{x(0, c), x(1, c)};
    int best = 0;
    double best_d = 1e300;
    for (int k = 0; k < 6; ++k) {
      const double d2 = dot(vsub(pt, spec.means[k]), vsub(pt, spec.means[k]));
      if (d2 < best_d) {
        best_d = d2;
        best = k;
      }
    }
    ++counts[best];
  }
  for (int k = 0; k < 6; ++k) {
    CHECK(counts[k] >= 60);
    CHECK(counts[k] <= 140);
  }

  MixtureSpec single;
  single.means = {Vector{10.0, -3.0}};
  RngStream rng2(3, 0);
  Matrix y = sample_mixture(single, 100000, rng2);
  double m0 = 0.0, m1 = 0.0;
  for (int c = 0; c < y.cols; ++c) {
    m0 += y(0, c);
    m1 += y(1, c);
  }
  CHECK(std::abs(m0 / y.cols - 10.0) <= 0.02);
  CHECK(std::abs(m1 / y.cols + 3.0) <= 0.02);

  RngStream r1(4, 9), r2(4, 9);
  Matrix a = sample_mixture(spec, 10, r1);
  Matrix b = sample_mixture(spec, 10, r2);
  CHECK(a.data == b.data);
  CHECK_THROWS(sample_mixture(spec, 0, r1));
}

TEST_CASE("mixture_log_density values and stability") {
  MixtureSpec single;
  single.means = {Vector{0.0, 0.0}};
  CHECK(mixture_log_density(single, Vector{0.0, 0.0}) ==
        doctest::Approx(-std::log(2.0 * std::numbers::pi)));

  // Two symmetric components: at the origin both exponents agree, so the
  // log-mean equals the common exponent.
  MixtureSpec two;
  two.means = {Vector{3.0, 0.0}, Vector{-3.0, 0.0}};
  const double at0 = mixture_log_density(two, Vector{0.0, 0.0});
  CHECK(at0 == doctest::Approx(-std::log(2.0 * std::numbers::pi) - 4.5));

  // Naive sum oracle at a generic point.
  Vector x{1.0, -2.0};
  double naive = 0.0;
  for (const Vector& mu : two.means) {
    const double d2 = dot(vsub(x, mu), vsub(x, mu));
    naive += std::exp(-0.5 * d2) / (2.0 * std::numbers::pi);
  }
  naive /= 2.0;
  CHECK(mixture_log_density(two, x) == doctest::Approx(std::log(naive)));

  // Far field stays finite through log-sum-exp.
  CHECK(std::isfinite(mixture_log_density(two, Vector{23.0, 0.0})));
  CHECK(mixture_log_density(two, Vector{1000.0, 0.0}) < -1e5);
}

TEST_CASE("langevin scalar chain matches the AR(1) stationary variance") {
  Matrix theta(1, 1);
  theta(0, 0) = 1.0;
  const double delta = 0.1;
  const Matrix S = ar1_stationary_cov(theta, delta);
  CHECK(S(0, 0) == doctest::Approx(10000.0 / 9975.0).epsilon(1e-10));

  RngStream rng(5, 0);
  Matrix init(1, 400);
  Matrix out = langevin_run(theta, delta, 20000, rng, init);
  double var = 0.0;
  for (int c = 0; c < out.cols; ++c) var += out(0, c) * out(0, c);
  var /= out.cols;
  CHECK(var == doctest::Approx(S(0, 0)).epsilon(0.25));
}

TEST_CASE("ar1_stationary_cov limits and structure") {
  Matrix theta(2, 2);
  theta(0, 0) = 4.0;
  theta(1, 1) = 1.0;
  Matrix S = ar1_stationary_cov(theta, 1e-3);
  CHECK(S(0, 0) == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(S(1, 1) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(S(0, 1)) <= 1e-12);
  CHECK(std::abs(S(1, 0)) <= 1e-12);
}

TEST_CASE("langevin instability is rejected") {
  Matrix theta(1, 1);
  theta(0, 0) = 1000.0;
  RngStream rng(6, 0);
  Matrix init(1, 2);
  CHECK_THROWS(langevin_run(theta, 0.07, 10, rng, init));  // (delta^2/2)*1000 = 2.45 >= 2
  CHECK_THROWS(ar1_stationary_cov(theta, 0.07));
}

TEST_CASE("max_eigenvalue_sym on a known matrix") {
  Matrix m(2, 2);
  m(0, 0) = 2.0;
  m(0, 1) = m(1, 0) = 1.0;
  m(1, 1) = 2.0;
  CHECK(max_eigenvalue_sym(m) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("sample_gaussian_precision covariance matches Theta^{-1}") {
  Matrix theta(2, 2);
  theta(0, 0) = 2.0;
  theta(0, 1) = theta(1, 0) = 0.5;
  theta(1, 1) = 1.0;
  // Theta^{-1} = (1/1.75) [[1, -0.5], [-0.5, 2]]
  RngStream rng(7, 0);
  const int n = 200000;
  Matrix x = sample_gaussian_precision(theta, n, rng);
  double s00 = 0.0, s01 = 0.0, s11 = 0.0;
  for (int c = 0; c < n; ++c) {
    s00 += x(0, c) * x(0, c);
    s01 += x(0, c) * x(1, c);
    s11 += x(1, c) * x(1, c);
  }
  CHECK(s00 / n == doctest::Approx(1.0 / 1.75).epsilon(0.02));
  CHECK(s01 / n == doctest::Approx(-0.5 / 1.75).epsilon(0.05));
  CHECK(s11 / n == doctest::Approx(2.0 / 1.75).epsilon(0.02));
}
