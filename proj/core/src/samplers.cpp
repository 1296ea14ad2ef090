#include "mrmap/samplers.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mrmap {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m(i, j) = e(i, j);
  return m;
}

}  // namespace

RngStream::RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {
  key_ = mix64(seed + kGolden) ^ mix64(stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
}

uint64_t RngStream::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double RngStream::next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::next_double_open() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::next_normal() {
  const double u1 = next_double_open();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t RngStream::next_below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  const uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
  for (;;) {
    const uint64_t v = next_u64();
    if (v >= threshold) return v % bound;
  }
}

MixtureSpec MixtureSpec::default_hexagon() {
  MixtureSpec spec;
  for (int k = 0; k < 6; ++k) {
    const double angle = k * std::numbers::pi / 3.0;
    spec.means.push_back({8.0 * std::cos(angle), 8.0 * std::sin(angle)});
  }
  return spec;
}

Matrix sample_mixture(const MixtureSpec& spec, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be positive");
  if (spec.means.empty()) throw std::invalid_argument("sample_mixture: empty spec");
  const int dim = spec.dim();
  Matrix out(dim, n);
  for (int col = 0; col < n; ++col) {
    const auto comp = static_cast<size_t>(rng.next_below(spec.means.size()));
    for (int i = 0; i < dim; ++i) out(i, col) = spec.means[comp][i] + rng.next_normal();
  }
  return out;
}

double mixture_log_density(const MixtureSpec& spec, const Vector& x) {
  const int dim = spec.dim();
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("mixture_log_density: dimension mismatch");
  const double log_norm = -0.5 * dim * std::log(2.0 * std::numbers::pi);
  double max_exp = -std::numeric_limits<double>::infinity();
  std::vector<double> exps(spec.means.size());
  for (size_t k = 0; k < spec.means.size(); ++k) {
    double sq = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double dlt = x[i] - spec.means[k][i];
      sq += dlt * dlt;
    }
    exps[k] = -0.5 * sq;
    max_exp = std::max(max_exp, exps[k]);
  }
  double s = 0.0;
  for (double e : exps) s += std::exp(e - max_exp);
  return log_norm + max_exp + std::log(s) - std::log(static_cast<double>(spec.means.size()));
}

double max_eigenvalue_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
  return es.eigenvalues().maxCoeff();
}

Matrix langevin_run(const Matrix& Theta, double delta, int n_iters, RngStream& rng,
                    const Matrix& init, const std::vector<int>& snapshot_iters,
                    std::vector<Matrix>* snapshots) {
  if (Theta.rows != Theta.cols) throw std::invalid_argument("langevin_run: Theta must be square");
  if (init.rows != Theta.rows) throw std::invalid_argument("langevin_run: init dimension mismatch");
  const double lam_max = max_eigenvalue_sym(Theta);
  if (0.5 * delta * delta * lam_max >= 2.0)
    throw std::invalid_argument("langevin_run: unstable step, (delta^2/2)*lambda_max = " +
                                std::to_string(0.5 * delta * delta * lam_max));
  const int p = Theta.rows;
  const int n = init.cols;
  Matrix x = init;
  Vector col(p), tcol(p);
  size_t snap = 0;
  const double half = 0.5 * delta * delta;
  for (int it = 0; it < n_iters; ++it) {
    for (int c = 0; c < n; ++c) {
      for (int i = 0; i < p; ++i) col[i] = x(i, c);
      tcol = matvec(Theta, col);
      for (int i = 0; i < p; ++i) x(i, c) = col[i] - half * tcol[i] + delta * rng.next_normal();
    }
    if (snapshots && snap < snapshot_iters.size() && it + 1 == snapshot_iters[snap]) {
      snapshots->push_back(x);
      ++snap;
    }
  }
  return x;
}

Matrix ar1_stationary_cov(const Matrix& Theta, double delta) {
  const double lam_max = max_eigenvalue_sym(Theta);
  if (0.5 * delta * delta * lam_max >= 2.0)
    throw std::invalid_argument("ar1_stationary_cov: unstable step");
  const int p = Theta.rows;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(p, p) - 0.5 * delta * delta * to_eigen(Theta);
  Eigen::MatrixXd Q = delta * delta * Eigen::MatrixXd::Identity(p, p);
  // Fixed-point series S = sum_k A^k Q (A^T)^k with doubling.
  Eigen::MatrixXd S = Q;
  Eigen::MatrixXd Ak = A;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::MatrixXd Snew = S + Ak * S * Ak.transpose();
    Ak = Ak * Ak;
    const double diff = (Snew - S).cwiseAbs().maxCoeff();
    S = Snew;
    if (diff <= 1e-14 * S.cwiseAbs().maxCoeff()) break;
  }
  return from_eigen(S);
}

Matrix sample_gaussian_precision(const Matrix& Theta, int n, RngStream& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(to_eigen(Theta));
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("sample_gaussian_precision: Theta not SPD");
  const int p = Theta.rows;
  Eigen::MatrixXd z(p, n);
  for (int c = 0; c < n; ++c)
    for (int i = 0; i < p; ++i) z(i, c) = rng.next_normal();
  // x = L^{-T} z has covariance Theta^{-1} when Theta = L L^T.
  Eigen::MatrixXd x = llt.matrixU().solve(z);
  return from_eigen(x);
}

}  // namespace mrmap
