#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "mrmap/flow.hpp"
#include "mrmap/grad.hpp"
#include "mrmap/train.hpp"

namespace test_support {

using mrmap::Matrix;
using mrmap::Vector;

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

inline Eigen::VectorXd to_eigen(const Vector& v) {
  Eigen::VectorXd e(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) e(static_cast<int>(i)) = v[i];
  return e;
}

inline Vector from_eigen(const Eigen::VectorXd& e) {
  Vector v(static_cast<size_t>(e.size()));
  for (int i = 0; i < e.size(); ++i) v[static_cast<size_t>(i)] = e(i);
  return v;
}

inline Vector random_vector(int n, mrmap::RngStream& rng, double scale = 1.0) {
  Vector v(static_cast<size_t>(n));
  for (double& x : v) x = scale * rng.next_normal();
  return v;
}

inline Matrix random_matrix(int r, int c, mrmap::RngStream& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (double& x : m.data) x = scale * rng.next_normal();
  return m;
}

/// Fully randomized model parameters with w_j >= 0.
inline mrmap::PotentialParams random_params(int p, int q, int ell, mrmap::RngStream& rng,
                                            double beta = 0.5, double h = 0.7) {
  mrmap::PotentialParams params;
  params.p = p;
  params.q = q;
  params.ell = ell;
  params.beta = beta;
  params.h = h;
  params.sigma = 0.3;
  params.K = random_matrix(p, q, rng, 0.6);
  params.layers.resize(static_cast<size_t>(ell));
  for (auto& layer : params.layers) {
    layer.K = random_matrix(q, q, rng, 0.5);
    layer.b = random_vector(q, rng, 0.4);
    layer.w = random_vector(q, rng, 0.3);
    for (double& w : layer.w) w = std::abs(w);
  }
  params.r = random_vector(q, rng, 0.3);
  params.W_omega = random_matrix(q, q, rng, 0.3);
  params.b_omega = random_vector(q, rng, 0.3);
  return params;
}

struct Instance {
  mrmap::PotentialParams params;
  mrmap::LatentDatum datum;
  Vector x;
};

/// Smallest |preactivation| over all layers along the emitted trajectory.
inline double min_preactivation(const mrmap::PotentialParams& params,
                                const mrmap::FlowTrajectory& traj) {
  double lo = 1e300;
  for (int j = 0; j < params.ell; ++j) {
    const auto& layer = params.layers[static_cast<size_t>(j)];
    Vector pre = mrmap::matvec(layer.K, traj.u[static_cast<size_t>(j)]);
    for (int i = 0; i < params.q; ++i)
      lo = std::min(lo, std::abs(pre[static_cast<size_t>(i)] + layer.b[static_cast<size_t>(i)]));
  }
  return lo;
}

/// Random small instance whose preactivations stay away from the activation
/// kink, so finite differences of the loss are trustworthy.
inline Instance random_kink_excluded_instance(mrmap::RngStream& rng, int p_max = 3, int q_max = 5,
                                              int ell_max = 4, double margin = 1e-3) {
  for (;;) {
    const int p = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(p_max)));
    const int q = p + static_cast<int>(rng.next_below(static_cast<uint64_t>(q_max - p + 1)));
    const int ell = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(ell_max)));
    Instance inst;
    inst.params = random_params(p, q, ell, rng);
    inst.x = random_vector(p, rng);
    mrmap::ForwardOperator op = mrmap::ForwardOperator::identity(p);
    inst.datum = mrmap::make_latent(inst.x, op, 0.2, rng);
    mrmap::FlowTrajectory traj = mrmap::run_flow(inst.params, inst.datum);
    if (min_preactivation(inst.params, traj) >= margin) return inst;
  }
}

}  // namespace test_support
