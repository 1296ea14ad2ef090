#pragma once

#include <filesystem>
#include <vector>

#include "mrmap/gaussian.hpp"
#include "mrmap/samplers.hpp"
#include "mrmap/train.hpp"

namespace mrmap_tools {

namespace fs = std::filesystem;

/// Scalar Gaussian estimator sweep. For every seed and every grid size the
/// three closed-form estimators are evaluated on a fresh sample; the report
/// carries the means at the largest grid size and the log-log slope of the
/// seed-averaged error |theta_hat - theta| against n.
struct Gauss1dConfig {
  double theta = 2.0;
  double sigma = 0.5;
  std::vector<int> n_grid = {100, 316, 1000, 3162, 10000, 31623, 100000};
  int seeds = 50;
  uint64_t seed = 1;
  fs::path out;
};

struct Gauss1dReport {
  double mean_star = 0.0;
  double mean_hat = 0.0;
  double mean_tilde = 0.0;
  int negative_flags = 0;  // theta_hat sign flags across all rows
  double slope = 0.0;      // d log mean|theta_hat - theta| / d log n
};

Gauss1dReport run_gauss1d(const Gauss1dConfig& config);

/// Langevin sampling against the exact Gaussian, with snapshot scatters and
/// the slow-eigendirection variance ratio at every snapshot.
struct LangevinConfig {
  mrmap::Matrix Theta;  // defaults to [[1000,-1],[-1,2]] when empty
  double delta = 0.01;
  std::vector<int> snapshots = {1000, 2000, 3000, 4000};
  int chains = 20;
  uint64_t seed = 1;
  fs::path out;
};

struct LangevinReport {
  std::vector<int> iters;
  std::vector<double> slow_var;       // sample variance along the slow direction
  std::vector<double> slow_ratio;     // slow_var / true stationary variance
  std::vector<double> ar1_slow_var;   // exact AR(1) prediction at stationarity
  double true_slow_var = 0.0;
  std::vector<mrmap::Matrix> snapshot_samples;  // dim x chains, one per snapshot
};

LangevinReport run_langevin(const LangevinConfig& config);

/// Gaussian-mixture recovery experiment: train on fresh mixture samples, then
/// recover a held-out validation set and score denoising MSE and nearest-mean
/// preservation.
struct MixtureConfig {
  mrmap::TrainConfig train;
  int n_train = 600;
  int n_val = 1000;
  fs::path out;

  MixtureConfig() {
    // Defaults reproduce the reference run: small h keeps the layer forces
    // gentle and beta ~ 0.4 balances the consistency term against recovery.
    train.beta = 0.4;
    train.h = 0.1;
    train.seed = 1;
  }
};

struct MixtureReport {
  double final_rc = 0.0;       // mean R_c over the last epoch
  double val_mse = 0.0;        // mean ||xhat - x||^2 on validation
  double preservation = 0.0;   // fraction with nearest mixture mean unchanged
  double train_seconds = 0.0;
  std::vector<mrmap::EpochMetrics> metrics;
  mrmap::PotentialParams params;
};

MixtureReport run_mixture(const MixtureConfig& config);

/// Index of the nearest mixture mean (Euclidean).
int nearest_mean(const mrmap::MixtureSpec& spec, const mrmap::Vector& x);

/// Masked-recovery sweep over observed-pixel fractions. Per (image, mask) the
/// relative error ||xhat - x||^2 / ||x||^2 is computed, then averaged;
/// all-zero images are skipped with a warning.
struct RecoverConfig {
  mrmap::PotentialParams params;
  double sigma = 0.05;
  mrmap::Matrix images;  // p x n, one column per image
  std::vector<double> fractions = {0.05, 0.10, 0.20, 0.30};
  int masks_per_image = 10;
  uint64_t seed = 1;
  int pgm_examples = 0;  // emit PGMs for the first few images
  fs::path out;
};

struct RecoverReport {
  std::vector<double> fractions;
  std::vector<double> mean_rel_err;
  std::vector<double> std_rel_err;
  int skipped = 0;
};

RecoverReport run_recover(const RecoverConfig& config);

void write_metrics_csv(const fs::path& path, const std::vector<mrmap::EpochMetrics>& metrics);

}  // namespace mrmap_tools
