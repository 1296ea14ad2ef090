#pragma once

#include "mrmap/operators.hpp"

namespace mrmap {

/// Closed-form reference estimators for the Gaussian cases: the 1D variance
/// example, the multivariate MAP with its bias/variance, the sample gradient
/// estimate for the precision matrix, and the score identity.

/// theta_hat_1d may come out negative for small samples; the flag reports it
/// instead of clamping.
struct FlaggedEstimate {
  double value = 0.0;
  bool negative = false;
};

/// ||x||^2 / n, the frequentist-MSE minimizer (also the MLE).
double theta_star_1d(const Vector& x);

/// sigma^2 d.x / (||d||^2 - d.x)
FlaggedEstimate theta_hat_1d(const Vector& x, const Vector& d, double sigma);

/// The conditional-likelihood comparison estimator.
double theta_tilde_1d(const Vector& x, const Vector& d, double sigma);

/// Posterior-mean shrinkage x_hat = theta/(sigma^2+theta) d.
Vector map_1d(double theta, double sigma, const Vector& d);
double posterior_var_1d(double theta, double sigma);

/// sigma^4 ||x||^2/(sigma^2+theta)^2 + n sigma^2 theta^2/(sigma^2+theta)^2
double mse_map_1d(double theta, double sigma, const Vector& x);

/// x_hat = (P^T P + sigma^2 Theta^{-1})^{-1} P^T d, dense solve.
Vector map_multivariate(const Matrix& Theta, double sigma, const ForwardOperator& P,
                        const Vector& d);

struct BiasVar {
  Vector bias;
  Matrix covariance;
};

/// bias = -sigma^2 H Theta^{-1} x, cov = sigma^2 H P^T P H,
/// with H = (P^T P + sigma^2 Theta^{-1})^{-1}.
BiasVar bias_var_multivariate(const Matrix& Theta, double sigma, const ForwardOperator& P,
                              const Vector& x);

/// (1/2n) X X^T - (1/2N) Xt Xt^T
Matrix mle_grad_estimate(const Matrix& X, const Matrix& Xtilde);

struct ScoreIdentity {
  double lhs = 0.0;      // E d/dtheta [x^2/(2 theta)] analytically
  double rhs = 0.0;      // -d/dtheta log Z(theta)
  double mc_lhs = 0.0;   // Monte-Carlo estimate of lhs
  double mc_se = 0.0;    // its standard error
};

/// Both sides equal -1/(2 theta) for the scalar Gaussian potential
/// x^2/(2 theta). The Monte-Carlo column uses n_draws samples.
ScoreIdentity score_identity_check(double theta, int n_draws, RngStream& rng);

}  // namespace mrmap
