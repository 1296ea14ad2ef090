#pragma once

#include "mrmap/linalg.hpp"

namespace mrmap {

/// All learnables and hyperparameters of the least-action potential.
/// K decodes the embedding (p x q); each layer carries (K_j, b_j, w_j) with
/// w_j kept entrywise nonnegative by the trainer; r is the terminal bias and
/// (W_omega, b_omega) parameterize the learned initializer.
struct PotentialParams {
  Matrix K;  // p x q
  struct Layer {
    Matrix K;  // q x q
    Vector b;  // q
    Vector w;  // q, entries >= 0
  };
  std::vector<Layer> layers;  // size ell
  Vector r;                   // q
  Matrix W_omega;             // q x q
  Vector b_omega;             // q

  double beta = 0.1;
  double h = 1.0;
  double sigma = 1.0;
  int ell = 1;
  int q = 0;
  int p = 0;
};

struct FlowTrajectory {
  std::vector<Vector> u;  // u_0 .. u_ell, each length q
  Vector q_vec;           // terminal-consistency vector
};

/// f(t) = 1/2 max(t, 0)^2
double act(double t);
/// f'(t) = max(t, 0); the subgradient at the kink is 0.
double act_prime(double t);
Vector act(const Vector& t);
Vector act_prime(const Vector& t);

/// w_j^T f(K_j u_j + b_j)
double layer_energy(const PotentialParams& params, int j, const Vector& u_j);

/// 1/2 sum_j ||u_j - u_{j-1}||^2 + h^2 sum_j layer_energy + r^T u_ell
double potential_value(const PotentialParams& params, const std::vector<Vector>& u);

/// Exact gradient of potential_value with respect to each block u_j.
std::vector<Vector> potential_grad_u(const PotentialParams& params, const std::vector<Vector>& u);

/// Shape/invariant check; throws on inconsistency.
void validate(const PotentialParams& params);

}  // namespace mrmap
