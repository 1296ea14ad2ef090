#include "mrmap/grad.hpp"

#include <cmath>

namespace mrmap {

ParamGradient ParamGradient::zeros_like(const PotentialParams& params) {
  ParamGradient g;
  g.K = Matrix(params.K.rows, params.K.cols);
  g.layers.resize(params.layers.size());
  for (size_t j = 0; j < params.layers.size(); ++j) {
    g.layers[j].K = Matrix(params.layers[j].K.rows, params.layers[j].K.cols);
    g.layers[j].b.assign(params.layers[j].b.size(), 0.0);
    g.layers[j].w.assign(params.layers[j].w.size(), 0.0);
  }
  g.r.assign(params.r.size(), 0.0);
  g.W_omega = Matrix(params.W_omega.rows, params.W_omega.cols);
  g.b_omega.assign(params.b_omega.size(), 0.0);
  return g;
}

void ParamGradient::accumulate(const ParamGradient& other, double scale) {
  axpy(scale, other.K.data, K.data);
  for (size_t j = 0; j < layers.size(); ++j) {
    axpy(scale, other.layers[j].K.data, layers[j].K.data);
    axpy(scale, other.layers[j].b, layers[j].b);
    axpy(scale, other.layers[j].w, layers[j].w);
  }
  axpy(scale, other.r, r);
  axpy(scale, other.W_omega.data, W_omega.data);
  axpy(scale, other.b_omega, b_omega);
}

void ParamGradient::scale_all(double s) {
  scal(s, K.data);
  for (auto& layer : layers) {
    scal(s, layer.K.data);
    scal(s, layer.b);
    scal(s, layer.w);
  }
  scal(s, r);
  scal(s, W_omega.data);
  scal(s, b_omega);
}

bool ParamGradient::finite() const {
  if (!all_finite(K) || !all_finite(r) || !all_finite(W_omega) || !all_finite(b_omega))
    return false;
  for (const auto& layer : layers)
    if (!all_finite(layer.K) || !all_finite(layer.b) || !all_finite(layer.w)) return false;
  return true;
}

namespace {

LossParts losses_from(const PotentialParams& params, const ForwardOperator& op,
                      const Vector& xhat, const Vector& q_vec, const Vector& u_ell,
                      const Vector& x_true, double alpha, double gamma, Vector* diff_out,
                      Vector* pdiff_out, Vector* cdiff_out) {
  Vector diff = vsub(xhat, x_true);
  Vector pdiff = mrmap::apply(op, diff);
  Vector cdiff = vsub(q_vec, u_ell);
  LossParts loss;
  loss.re = dot(diff, diff);
  loss.rp = dot(pdiff, pdiff);
  loss.rc = dot(cdiff, cdiff);
  loss.total = loss.re + alpha * loss.rp + gamma * loss.rc;
  (void)params;
  if (diff_out) *diff_out = std::move(diff);
  if (pdiff_out) *pdiff_out = std::move(pdiff);
  if (cdiff_out) *cdiff_out = std::move(cdiff);
  return loss;
}

double loss_only(const PotentialParams& params, const LatentDatum& datum, const Vector& x_true,
                 double alpha, double gamma, int cg_iters) {
  FlowTrajectory traj = run_flow(params, datum, cg_iters, 0.0);
  Vector xhat = decode(params, traj.u[params.ell]);
  return losses_from(params, datum.op, xhat, traj.q_vec, traj.u[params.ell], x_true, alpha, gamma,
                     nullptr, nullptr, nullptr)
      .total;
}

}  // namespace

LossAndGrad loss_and_grad(const PotentialParams& params, const LatentDatum& datum,
                          const Vector& x_true, double alpha, double gamma, int cg_iters) {
  validate(params);
  const ForwardOperator& op = datum.op;
  const int ell = params.ell;
  const int q = params.q;
  const double h2 = params.h * params.h;

  const LinMap M = [&params, &op](const Vector& u) {
    Vector v = matvec_t(params.K, mrmap::apply_adjoint(op, mrmap::apply(op, matvec(params.K, u))));
    axpy(params.beta, u, v);
    return v;
  };

  // Forward pass, traced. Mirrors run_flow exactly.
  const Vector Ptd = mrmap::apply_adjoint(op, datum.d);
  const Vector b1 = matvec_t(params.K, Ptd);
  CgTrace tr0;
  FlowTrajectory traj;
  traj.u.reserve(ell + 1);
  traj.u.push_back(cg_spd(M, b1, cg_iters, 0.0, &tr0));
  Vector z = matvec(params.W_omega, traj.u[0]);
  axpy(1.0, params.b_omega, z);
  Vector tz(q);
  for (int i = 0; i < q; ++i) tz[i] = std::tanh(z[i]);
  traj.u.push_back(vadd(traj.u[0], tz));

  std::vector<Vector> pre(ell);  // pre[j] = K_j u_j + b_j for interior steps
  for (int j = 1; j <= ell - 1; ++j) {
    const auto& layer = params.layers[j];
    Vector s = matvec(layer.K, traj.u[j]);
    axpy(1.0, layer.b, s);
    Vector force(q);
    for (int i = 0; i < q; ++i) force[i] = act_prime(s[i]) * layer.w[i];
    Vector next(q);
    for (int i = 0; i < q; ++i) next[i] = 2.0 * traj.u[j][i] - traj.u[j - 1][i];
    axpy(h2, matvec_t(layer.K, force), next);
    pre[j] = std::move(s);
    traj.u.push_back(std::move(next));
  }

  Vector rhs2 = b1;
  axpy(params.beta, traj.u[ell - 1], rhs2);
  axpy(params.beta, params.r, rhs2);
  CgTrace tr1;
  traj.q_vec = cg_spd(M, rhs2, cg_iters, 0.0, &tr1);

  Vector xhat = matvec(params.K, traj.u[ell]);
  Vector diff, pdiff, cdiff;
  LossParts loss = losses_from(params, op, xhat, traj.q_vec, traj.u[ell], x_true, alpha, gamma,
                               &diff, &pdiff, &cdiff);

  // Reverse pass.
  ParamGradient grad = ParamGradient::zeros_like(params);

  Vector xhatbar = diff;
  scal(2.0, xhatbar);
  axpy(2.0 * alpha, mrmap::apply_adjoint(op, pdiff), xhatbar);
  Vector qvbar = cdiff;
  scal(2.0 * gamma, qvbar);

  std::vector<Vector> ubar(ell + 1, Vector(q, 0.0));
  axpy(-2.0 * gamma, cdiff, ubar[ell]);
  axpy(1.0, matvec_t(params.K, xhatbar), ubar[ell]);
  outer_acc(grad.K, xhatbar, traj.u[ell]);

  const auto acc_operator = [&](const Vector& pk, const Vector& qbar) {
    // M(u) = K^T P^T P K u + beta u; adjoints of K from both K factors.
    Vector c1 = mrmap::apply_adjoint(op, mrmap::apply(op, matvec(params.K, pk)));
    outer_acc(grad.K, c1, qbar);
    Vector c2 = mrmap::apply_adjoint(op, mrmap::apply(op, matvec(params.K, qbar)));
    outer_acc(grad.K, c2, pk);
  };

  // Terminal solve.
  Vector rhs2bar = cg_spd_backward(M, tr1, qvbar, acc_operator);
  outer_acc(grad.K, Ptd, rhs2bar);
  axpy(params.beta, rhs2bar, ubar[ell - 1]);
  axpy(params.beta, rhs2bar, grad.r);

  // Hyperbolic recurrence.
  for (int j = ell - 1; j >= 1; --j) {
    const auto& layer = params.layers[j];
    auto& glayer = grad.layers[j];
    const Vector& v = ubar[j + 1];
    axpy(2.0, v, ubar[j]);
    axpy(-1.0, v, ubar[j - 1]);
    Vector force(q);
    for (int i = 0; i < q; ++i) force[i] = act_prime(pre[j][i]) * layer.w[i];
    outer_acc(glayer.K, force, v, h2);
    Vector forcebar = matvec(layer.K, v);
    scal(h2, forcebar);
    Vector sbar(q);
    for (int i = 0; i < q; ++i) {
      glayer.w[i] += forcebar[i] * act_prime(pre[j][i]);
      sbar[i] = pre[j][i] > 0.0 ? forcebar[i] * layer.w[i] : 0.0;
    }
    axpy(1.0, sbar, glayer.b);
    outer_acc(glayer.K, sbar, traj.u[j]);
    axpy(1.0, matvec_t(layer.K, sbar), ubar[j]);
  }

  // Initializer.
  {
    const Vector& v = ubar[1];
    Vector zbar(q);
    for (int i = 0; i < q; ++i) zbar[i] = v[i] * (1.0 - tz[i] * tz[i]);
    axpy(1.0, v, ubar[0]);
    axpy(1.0, zbar, grad.b_omega);
    outer_acc(grad.W_omega, zbar, traj.u[0]);
    axpy(1.0, matvec_t(params.W_omega, zbar), ubar[0]);
  }

  // Initial solve.
  Vector b1bar = cg_spd_backward(M, tr0, ubar[0], acc_operator);
  outer_acc(grad.K, Ptd, b1bar);

  LossAndGrad out;
  out.loss = loss;
  out.grad = std::move(grad);
  out.traj = std::move(traj);
  return out;
}

std::vector<double*> flatten_learnables(PotentialParams& params) {
  std::vector<double*> out;
  for (double& v : params.K.data) out.push_back(&v);
  for (auto& layer : params.layers) {
    for (double& v : layer.K.data) out.push_back(&v);
    for (double& v : layer.b) out.push_back(&v);
    for (double& v : layer.w) out.push_back(&v);
  }
  for (double& v : params.r) out.push_back(&v);
  for (double& v : params.W_omega.data) out.push_back(&v);
  for (double& v : params.b_omega) out.push_back(&v);
  return out;
}

std::vector<double*> flatten_learnables(ParamGradient& grad) {
  std::vector<double*> out;
  for (double& v : grad.K.data) out.push_back(&v);
  for (auto& layer : grad.layers) {
    for (double& v : layer.K.data) out.push_back(&v);
    for (double& v : layer.b) out.push_back(&v);
    for (double& v : layer.w) out.push_back(&v);
  }
  for (double& v : grad.r) out.push_back(&v);
  for (double& v : grad.W_omega.data) out.push_back(&v);
  for (double& v : grad.b_omega) out.push_back(&v);
  return out;
}

double fd_check(const PotentialParams& params, const LatentDatum& datum, const Vector& x_true,
                double alpha, double gamma, double step, int cg_iters) {
  if (!(step >= 1e-8 && step <= 1e-4)) throw std::invalid_argument("fd_check: step out of range");
  LossAndGrad lg = loss_and_grad(params, datum, x_true, alpha, gamma, cg_iters);
  PotentialParams work = params;
  std::vector<double*> entries = flatten_learnables(work);
  std::vector<double*> gentries = flatten_learnables(lg.grad);
  double max_rel = 0.0;
  for (size_t i = 0; i < entries.size(); ++i) {
    const double saved = *entries[i];
    *entries[i] = saved + step;
    const double lp = loss_only(work, datum, x_true, alpha, gamma, cg_iters);
    *entries[i] = saved - step;
    const double lm = loss_only(work, datum, x_true, alpha, gamma, cg_iters);
    *entries[i] = saved;
    const double fd = (lp - lm) / (2.0 * step);
    const double an = *gentries[i];
    const double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-8});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace mrmap
