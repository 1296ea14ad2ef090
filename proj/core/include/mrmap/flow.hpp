#pragma once

#include "mrmap/operators.hpp"
#include "mrmap/potential.hpp"

namespace mrmap {

/// u_0 = (K^T P^T P K + beta I)^{-1} K^T P^T d, via fixed-budget CG.
Vector initial_embed(const PotentialParams& params, const LatentDatum& datum, int cg_iters = 8,
                     double cg_tol = 0.0);

/// u_1 = u_0 + tanh(W_omega u_0 + b_omega).
Vector initialize_u1(const PotentialParams& params, const Vector& u0);

/// u_{j+1} = 2 u_j - u_{j-1} + h^2 K_j^T (f'(K_j u_j + b_j) .* w_j), 1 <= j <= ell-1.
Vector hyperbolic_step(const PotentialParams& params, int j, const Vector& u_j,
                       const Vector& u_jm1);

/// Full forward pass: initial solve, learned initializer, hyperbolic recurrence,
/// terminal consistency solve. Pure function of (params, datum) for a fixed
/// CG budget.
FlowTrajectory run_flow(const PotentialParams& params, const LatentDatum& datum, int cg_iters = 8,
                        double cg_tol = 0.0);

/// x_hat = K u_ell.
Vector decode(const PotentialParams& params, const Vector& u_ell);

}  // namespace mrmap
