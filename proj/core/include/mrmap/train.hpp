#pragma once

#include <cstdint>
#include <tuple>

#include "mrmap/grad.hpp"

namespace mrmap {

struct TrainConfig {
  int epochs = 120;
  int batch_size = 64;
  double lr = 1e-3;
  double lr_decay_factor = 0.5;
  int lr_decay_every = 20;
  double weight_decay = 1e-5;
  double alpha = 1.0;
  double gamma = 1.0;
  double sigma = 1.0;
  double mask_fraction = 1.0;
  uint64_t seed = 0;
  // Architecture and potential hyperparameters.
  int q = 128;
  int ell = 5;
  double beta = 0.1;
  double h = 1.0;
  int cg_iters = 8;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double re = 0.0;
  double rp = 0.0;
  double rc = 0.0;
  double total = 0.0;
  double lr = 0.0;
  double wall_seconds = 0.0;
};

/// Per-sample loss terms (plain squared norms; averaging happens per batch).
std::tuple<double, double, double> compute_losses(const PotentialParams& params,
                                                  const FlowTrajectory& traj,
                                                  const LatentDatum& datum, const Vector& x_true);

double total_loss(double re, double rp, double rc, double alpha, double gamma);

struct AdamState {
  ParamGradient m;
  ParamGradient v;
  long step = 0;
  static AdamState zeros_like(const PotentialParams& params);
};

/// Bias-corrected Adam (beta1 = 0.9, beta2 = 0.999, eps = 1e-8); weight decay
/// is an additive lr*wd*param subtraction on everything except the w_j, which
/// are projected to >= 0 afterwards.
void adam_step(PotentialParams& params, AdamState& state, const ParamGradient& grads, double lr,
               double weight_decay);

/// K and K_j entries i.i.d N(0, 1/q); w_j = 1e-2; b_j, r, W_omega, b_omega = 0.
PotentialParams init_params(int p, int q, int ell, double beta, double h, double sigma,
                            uint64_t seed);

struct FitResult {
  PotentialParams params;
  std::vector<EpochMetrics> metrics;
};

/// Full training loop: per batch iteration every sample gets a fresh mask and
/// fresh noise from its own stream, gradients are summed in sample-index
/// order, and the learning rate follows lr0 * factor^floor(epoch/decay_every).
/// Deterministic given config.seed.
FitResult fit(const Matrix& data, const TrainConfig& config);

using Recovery = std::function<Vector(const LatentDatum&)>;

/// Monte-Carlo mean of ||x_hat - x||^2 over evaluation points and n_noise
/// fresh (mask, noise) draws per point.
double empirical_mse(const Recovery& recover, const Matrix& x_eval, double sigma,
                     double mask_fraction, int n_noise, RngStream& rng);

}  // namespace mrmap
