#pragma once

#include <cstdint>
#include <vector>

#include "mrmap/linalg.hpp"

namespace mrmap {

/// Counter-based random stream. The k-th output is a pure function of
/// (seed, stream, k): a splitmix64-style finalizer applied to a per-stream
/// key plus the counter. Identical (seed, stream) always reproduce the same
/// sequence, independently of any other stream.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream = 0);

  uint64_t next_u64();
  /// Uniform in [0, 1), 53 random bits.
  double next_double();
  /// Uniform in (0, 1].
  double next_double_open();
  /// Standard normal via Box-Muller; consumes two counter values per draw.
  double next_normal();
  /// Uniform integer in [0, bound) without modulo bias.
  uint64_t next_below(uint64_t bound);

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t key_;
  uint64_t counter_ = 0;
};

/// Equal-weight Gaussian mixture with unit component covariance.
struct MixtureSpec {
  std::vector<Vector> means;
  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }

  /// Six components on a circle of radius 8 at 60-degree spacing.
  static MixtureSpec default_hexagon();
};

/// Draws n points (columns) from the mixture.
Matrix sample_mixture(const MixtureSpec& spec, int n, RngStream& rng);

/// log of the equal-weight mixture density, log-sum-exp stabilized.
double mixture_log_density(const MixtureSpec& spec, const Vector& x);

/// One Langevin step is X <- X - (delta^2/2) Theta X + delta E. Columns of the
/// state are independent chains. Snapshots are recorded after the iteration
/// counts listed in snapshot_iters (ascending). Errors out if the iteration
/// matrix is unstable.
Matrix langevin_run(const Matrix& Theta, double delta, int n_iters, RngStream& rng,
                    const Matrix& init, const std::vector<int>& snapshot_iters = {},
                    std::vector<Matrix>* snapshots = nullptr);

/// Exact stationary covariance of the Langevin iteration: the fixed point of
/// S = A S A^T + delta^2 I with A = I - (delta^2/2) Theta.
Matrix ar1_stationary_cov(const Matrix& Theta, double delta);

/// Largest eigenvalue (symmetric matrix), used for the stability check.
double max_eigenvalue_sym(const Matrix& m);

/// Exact sampler from N(0, Theta^{-1}) via Cholesky, n columns.
Matrix sample_gaussian_precision(const Matrix& Theta, int n, RngStream& rng);

}  // namespace mrmap
