#include "mrmap/train.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace mrmap {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

constexpr uint64_t kInitStream = 0xFFFFFFFF00000001ull;

void adam_array(double* p, const double* g, double* m, double* v, size_t n, double lr,
                double wd, double c1, double c2, bool decay, bool clamp) {
  for (size_t i = 0; i < n; ++i) {
    m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
    v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
    if (decay) p[i] -= lr * wd * p[i];
    if (clamp && p[i] < 0.0) p[i] = 0.0;
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1) throw std::invalid_argument("TrainConfig: epochs/batch_size");
  if (!(lr > 0.0) || !(sigma > 0.0) || !(beta > 0.0) || !(h > 0.0))
    throw std::invalid_argument("TrainConfig: positivity");
  if (weight_decay < 0.0 || alpha < 0.0 || gamma < 0.0)
    throw std::invalid_argument("TrainConfig: nonnegativity");
  if (!(mask_fraction > 0.0) || mask_fraction > 1.0)
    throw std::invalid_argument("TrainConfig: mask_fraction must be in (0, 1]");
  if (lr_decay_every < 1 || q < 1 || ell < 1 || cg_iters < 1)
    throw std::invalid_argument("TrainConfig: counts");
}

std::tuple<double, double, double> compute_losses(const PotentialParams& params,
                                                  const FlowTrajectory& traj,
                                                  const LatentDatum& datum, const Vector& x_true) {
  Vector xhat = decode(params, traj.u[params.ell]);
  Vector diff = vsub(xhat, x_true);
  Vector pdiff = mrmap::apply(datum.op, diff);
  Vector cdiff = vsub(traj.q_vec, traj.u[params.ell]);
  return {dot(diff, diff), dot(pdiff, pdiff), dot(cdiff, cdiff)};
}

double total_loss(double re, double rp, double rc, double alpha, double gamma) {
  return re + alpha * rp + gamma * rc;
}

AdamState AdamState::zeros_like(const PotentialParams& params) {
  AdamState s;
  s.m = ParamGradient::zeros_like(params);
  s.v = ParamGradient::zeros_like(params);
  return s;
}

void adam_step(PotentialParams& params, AdamState& state, const ParamGradient& grads, double lr,
               double weight_decay) {
  state.step += 1;
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  auto step = [&](Vector& p, const Vector& g, Vector& m, Vector& v, bool decay, bool clamp) {
    if (p.size() != g.size()) throw std::invalid_argument("adam_step: shape mismatch");
    adam_array(p.data(), g.data(), m.data(), v.data(), p.size(), lr, weight_decay, c1, c2, decay,
               clamp);
  };
  step(params.K.data, grads.K.data, state.m.K.data, state.v.K.data, true, false);
  for (size_t j = 0; j < params.layers.size(); ++j) {
    step(params.layers[j].K.data, grads.layers[j].K.data, state.m.layers[j].K.data,
         state.v.layers[j].K.data, true, false);
    step(params.layers[j].b, grads.layers[j].b, state.m.layers[j].b, state.v.layers[j].b, true,
         false);
    step(params.layers[j].w, grads.layers[j].w, state.m.layers[j].w, state.v.layers[j].w, false,
         true);
  }
  step(params.r, grads.r, state.m.r, state.v.r, true, false);
  step(params.W_omega.data, grads.W_omega.data, state.m.W_omega.data, state.v.W_omega.data, true,
       false);
  step(params.b_omega, grads.b_omega, state.m.b_omega, state.v.b_omega, true, false);
}

PotentialParams init_params(int p, int q, int ell, double beta, double h, double sigma,
                            uint64_t seed) {
  PotentialParams params;
  params.p = p;
  params.q = q;
  params.ell = ell;
  params.beta = beta;
  params.h = h;
  params.sigma = sigma;
  RngStream rng(seed, kInitStream);
  const double sd = 1.0 / std::sqrt(static_cast<double>(q));
  params.K = Matrix(p, q);
  for (double& v : params.K.data) v = sd * rng.next_normal();
  params.layers.resize(ell);
  for (auto& layer : params.layers) {
    layer.K = Matrix(q, q);
    for (double& v : layer.K.data) v = sd * rng.next_normal();
    layer.b.assign(q, 0.0);
    layer.w.assign(q, 1e-2);
  }
  params.r.assign(q, 0.0);
  params.W_omega = Matrix(q, q);
  params.b_omega.assign(q, 0.0);
  validate(params);
  return params;
}

FitResult fit(const Matrix& data, const TrainConfig& config) {
  config.validate();
  const int p = data.rows;
  const int n = data.cols;
  if (n < 1) throw std::invalid_argument("fit: empty data");
  if (n < config.batch_size) throw std::invalid_argument("fit: batch_size exceeds sample count");

  FitResult result;
  result.params = init_params(p, config.q, config.ell, config.beta, config.h, config.sigma,
                              config.seed);
  AdamState opt = AdamState::zeros_like(result.params);

  std::vector<RngStream> streams;
  streams.reserve(n);
  for (int i = 0; i < n; ++i) streams.emplace_back(config.seed, static_cast<uint64_t>(i));

  std::vector<Vector> x(n, Vector(p));
  for (int i = 0; i < n; ++i)
    for (int row = 0; row < p; ++row) x[i][row] = data(row, i);

  const int n_batches = (n + config.batch_size - 1) / config.batch_size;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr =
        config.lr * std::pow(config.lr_decay_factor, epoch / config.lr_decay_every);
    double sum_re = 0.0, sum_rp = 0.0, sum_rc = 0.0, sum_total = 0.0;
    for (int b = 0; b < n_batches; ++b) {
      const int lo = b * config.batch_size;
      const int hi = std::min(n, lo + config.batch_size);
      ParamGradient batch_grad = ParamGradient::zeros_like(result.params);
      for (int i = lo; i < hi; ++i) {
        ForwardOperator op = sample_mask(p, config.mask_fraction, streams[i]);
        LatentDatum datum = make_latent(x[i], op, config.sigma, streams[i]);
        LossAndGrad lg = loss_and_grad(result.params, datum, x[i], config.alpha, config.gamma,
                                       config.cg_iters);
        if (!std::isfinite(lg.loss.total)) {
          std::ostringstream msg;
          msg << "fit: non-finite loss at epoch " << epoch + 1 << ", sample " << i
              << " (re=" << lg.loss.re << ", rp=" << lg.loss.rp << ", rc=" << lg.loss.rc << ")";
          throw std::runtime_error(msg.str());
        }
        batch_grad.accumulate(lg.grad);
        sum_re += lg.loss.re;
        sum_rp += lg.loss.rp;
        sum_rc += lg.loss.rc;
        sum_total += lg.loss.total;
      }
      batch_grad.scale_all(1.0 / static_cast<double>(hi - lo));
      adam_step(result.params, opt, batch_grad, lr, config.weight_decay);
    }
    const auto t1 = std::chrono::steady_clock::now();
    EpochMetrics em;
    em.epoch = epoch + 1;
    em.re = sum_re / n;
    em.rp = sum_rp / n;
    em.rc = sum_rc / n;
    em.total = sum_total / n;
    em.lr = lr;
    em.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.metrics.push_back(em);
  }
  return result;
}

double empirical_mse(const Recovery& recover, const Matrix& x_eval, double sigma,
                     double mask_fraction, int n_noise, RngStream& rng) {
  if (n_noise < 1) throw std::invalid_argument("empirical_mse: n_noise must be positive");
  const int p = x_eval.rows;
  const int n = x_eval.cols;
  double total = 0.0;
  Vector x(p);
  for (int c = 0; c < n; ++c) {
    for (int row = 0; row < p; ++row) x[row] = x_eval(row, c);
    for (int t = 0; t < n_noise; ++t) {
      ForwardOperator op = sample_mask(p, mask_fraction, rng);
      LatentDatum datum = make_latent(x, op, sigma, rng);
      Vector xhat = recover(datum);
      Vector diff = vsub(xhat, x);
      total += dot(diff, diff);
    }
  }
  return total / (static_cast<double>(n) * n_noise);
}

}  // namespace mrmap
