#include "mrmap/gaussian.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace mrmap {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m(i, j) = e(i, j);
  return m;
}

Eigen::MatrixXd dense_ptp(const ForwardOperator& P) {
  Eigen::MatrixXd ptp = Eigen::MatrixXd::Zero(P.p, P.p);
  switch (P.kind) {
    case ForwardOperator::Kind::Identity:
      ptp.setIdentity();
      break;
    case ForwardOperator::Kind::Mask:
      for (int idx : P.indices) ptp(idx, idx) = 1.0;
      break;
    case ForwardOperator::Kind::Dense: {
      Eigen::MatrixXd pd = to_eigen(P.dense);
      ptp = pd.transpose() * pd;
      break;
    }
  }
  return ptp;
}

Eigen::MatrixXd system_matrix(const Matrix& Theta, double sigma, const ForwardOperator& P) {
  Eigen::MatrixXd th = to_eigen(Theta);
  if ((th - th.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("Theta must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(th);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("Theta must be SPD");
  Eigen::MatrixXd theta_inv = llt.solve(Eigen::MatrixXd::Identity(th.rows(), th.cols()));
  return dense_ptp(P) + sigma * sigma * theta_inv;
}

}  // namespace

double theta_star_1d(const Vector& x) {
  if (x.empty()) throw std::invalid_argument("theta_star_1d: empty sample");
  return dot(x, x) / static_cast<double>(x.size());
}

FlaggedEstimate theta_hat_1d(const Vector& x, const Vector& d, double sigma) {
  const double dx = dot(d, x);
  const double dd = dot(d, d);
  const double denom = dd - dx;
  if (std::abs(denom) < 1e-12) throw std::invalid_argument("theta_hat_1d: degenerate sample");
  FlaggedEstimate est;
  est.value = sigma * sigma * dx / denom;
  est.negative = est.value < 0.0;
  return est;
}

double theta_tilde_1d(const Vector& x, const Vector& d, double sigma) {
  const double n = static_cast<double>(x.size());
  const double s2 = sigma * sigma;
  const double xx = dot(x, x);
  const double dd = dot(d, d);
  const double denom = 2.0 * (n * s2 + dd - xx);
  if (std::abs(denom) < 1e-12) throw std::invalid_argument("theta_tilde_1d: degenerate sample");
  const double num = 2.0 * s2 * xx - n * s2 * s2 + s2 * std::sqrt(n * n * s2 * s2 + 4.0 * xx * dd);
  return num / denom;
}

Vector map_1d(double theta, double sigma, const Vector& d) {
  const double c = theta / (sigma * sigma + theta);
  Vector x = d;
  scal(c, x);
  return x;
}

double posterior_var_1d(double theta, double sigma) {
  return sigma * sigma * theta / (sigma * sigma + theta);
}

double mse_map_1d(double theta, double sigma, const Vector& x) {
  const double s2 = sigma * sigma;
  const double denom = (s2 + theta) * (s2 + theta);
  const double n = static_cast<double>(x.size());
  return s2 * s2 * dot(x, x) / denom + n * s2 * theta * theta / denom;
}

Vector map_multivariate(const Matrix& Theta, double sigma, const ForwardOperator& P,
                        const Vector& d) {
  Eigen::MatrixXd sys = system_matrix(Theta, sigma, P);
  Vector ptd = apply_adjoint(P, d);
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(ptd.data(), ptd.size());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  if (!lu.isInvertible()) throw std::invalid_argument("map_multivariate: singular system");
  Eigen::VectorXd sol = lu.solve(rhs);
  return Vector(sol.data(), sol.data() + sol.size());
}

BiasVar bias_var_multivariate(const Matrix& Theta, double sigma, const ForwardOperator& P,
                              const Vector& x) {
  Eigen::MatrixXd sys = system_matrix(Theta, sigma, P);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  if (!lu.isInvertible()) throw std::invalid_argument("bias_var_multivariate: singular system");
  Eigen::MatrixXd H = lu.solve(Eigen::MatrixXd::Identity(sys.rows(), sys.cols()));
  Eigen::MatrixXd theta_inv =
      to_eigen(Theta).llt().solve(Eigen::MatrixXd::Identity(Theta.rows, Theta.cols));
  Eigen::VectorXd xe = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
  Eigen::VectorXd bias = -sigma * sigma * H * theta_inv * xe;
  Eigen::MatrixXd cov = sigma * sigma * H * dense_ptp(P) * H;
  BiasVar out;
  out.bias = Vector(bias.data(), bias.data() + bias.size());
  out.covariance = from_eigen(cov);
  return out;
}

Matrix mle_grad_estimate(const Matrix& X, const Matrix& Xtilde) {
  if (X.cols < 1 || Xtilde.cols < 1) throw std::invalid_argument("mle_grad_estimate: empty input");
  if (X.rows != Xtilde.rows) throw std::invalid_argument("mle_grad_estimate: row mismatch");
  Eigen::MatrixXd xe = to_eigen(X);
  Eigen::MatrixXd xt = to_eigen(Xtilde);
  Eigen::MatrixXd g = xe * xe.transpose() / (2.0 * X.cols) - xt * xt.transpose() / (2.0 * Xtilde.cols);
  return from_eigen(g);
}

ScoreIdentity score_identity_check(double theta, int n_draws, RngStream& rng) {
  if (!(theta > 0.0)) throw std::invalid_argument("score_identity_check: theta must be positive");
  ScoreIdentity out;
  out.lhs = -1.0 / (2.0 * theta);
  out.rhs = -1.0 / (2.0 * theta);
  // Monte Carlo of E[-x^2/(2 theta^2)] with x ~ N(0, theta).
  double mean = 0.0, m2 = 0.0;
  const double sd = std::sqrt(theta);
  for (int i = 0; i < n_draws; ++i) {
    const double x = sd * rng.next_normal();
    const double v = -x * x / (2.0 * theta * theta);
    const double delta = v - mean;
    mean += delta / (i + 1);
    m2 += delta * (v - mean);
  }
  out.mc_lhs = mean;
  out.mc_se = n_draws > 1 ? std::sqrt(m2 / (n_draws - 1) / n_draws) : 0.0;
  return out;
}

}  // namespace mrmap
