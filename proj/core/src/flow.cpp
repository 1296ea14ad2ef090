#include "mrmap/flow.hpp"

#include <cmath>

namespace mrmap {

namespace {

LinMap normal_map(const PotentialParams& params, const ForwardOperator& op) {
  return [&params, &op](const Vector& u) {
    Vector v = matvec_t(params.K, mrmap::apply_adjoint(op, mrmap::apply(op, matvec(params.K, u))));
    axpy(params.beta, u, v);
    return v;
  };
}

}  // namespace

Vector initial_embed(const PotentialParams& params, const LatentDatum& datum, int cg_iters,
                     double cg_tol) {
  Vector rhs = matvec_t(params.K, mrmap::apply_adjoint(datum.op, datum.d));
  return cg_spd(normal_map(params, datum.op), rhs, cg_iters, cg_tol);
}

Vector initialize_u1(const PotentialParams& params, const Vector& u0) {
  if (static_cast<int>(u0.size()) != params.q)
    throw std::invalid_argument("initialize_u1: dimension mismatch");
  Vector z = matvec(params.W_omega, u0);
  axpy(1.0, params.b_omega, z);
  Vector u1 = u0;
  for (int i = 0; i < params.q; ++i) u1[i] += std::tanh(z[i]);
  return u1;
}

Vector hyperbolic_step(const PotentialParams& params, int j, const Vector& u_j,
                       const Vector& u_jm1) {
  if (j < 1 || j > params.ell - 1) throw std::out_of_range("hyperbolic_step: layer index");
  const auto& layer = params.layers[j];
  Vector s = matvec(layer.K, u_j);
  axpy(1.0, layer.b, s);
  Vector force(params.q);
  for (int i = 0; i < params.q; ++i) force[i] = act_prime(s[i]) * layer.w[i];
  Vector next(params.q);
  for (int i = 0; i < params.q; ++i) next[i] = 2.0 * u_j[i] - u_jm1[i];
  axpy(params.h * params.h, matvec_t(layer.K, force), next);
  return next;
}

FlowTrajectory run_flow(const PotentialParams& params, const LatentDatum& datum, int cg_iters,
                        double cg_tol) {
  validate(params);
  FlowTrajectory traj;
  traj.u.reserve(params.ell + 1);
  traj.u.push_back(initial_embed(params, datum, cg_iters, cg_tol));
  traj.u.push_back(initialize_u1(params, traj.u[0]));
  for (int j = 1; j <= params.ell - 1; ++j)
    traj.u.push_back(hyperbolic_step(params, j, traj.u[j], traj.u[j - 1]));

  Vector rhs = matvec_t(params.K, mrmap::apply_adjoint(datum.op, datum.d));
  axpy(params.beta, traj.u[params.ell - 1], rhs);
  axpy(params.beta, params.r, rhs);
  traj.q_vec = cg_spd(normal_map(params, datum.op), rhs, cg_iters, cg_tol);
  return traj;
}

Vector decode(const PotentialParams& params, const Vector& u_ell) {
  if (static_cast<int>(u_ell.size()) != params.q)
    throw std::invalid_argument("decode: dimension mismatch");
  return matvec(params.K, u_ell);
}

}  // namespace mrmap
