#include "mrmap/linalg.hpp"

#include <cmath>

namespace mrmap {

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(double a, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scal(double a, Vector& x) {
  for (double& v : x) v *= a;
}

Vector vadd(const Vector& a, const Vector& b) {
  Vector r = a;
  axpy(1.0, b, r);
  return r;
}

Vector vsub(const Vector& a, const Vector& b) {
  Vector r = a;
  axpy(-1.0, b, r);
  return r;
}

bool all_finite(const Vector& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.data); }

Vector matvec(const Matrix& m, const Vector& x) {
  if (static_cast<int>(x.size()) != m.cols) throw std::invalid_argument("matvec: size mismatch");
  Vector y(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* row = &m.data[static_cast<size_t>(i) * m.cols];
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vector matvec_t(const Matrix& m, const Vector& y) {
  if (static_cast<int>(y.size()) != m.rows) throw std::invalid_argument("matvec_t: size mismatch");
  Vector x(m.cols, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* row = &m.data[static_cast<size_t>(i) * m.cols];
    const double yi = y[i];
    for (int j = 0; j < m.cols; ++j) x[j] += row[j] * yi;
  }
  return x;
}

void outer_acc(Matrix& m, const Vector& a, const Vector& b, double scale) {
  if (static_cast<int>(a.size()) != m.rows || static_cast<int>(b.size()) != m.cols)
    throw std::invalid_argument("outer_acc: size mismatch");
  for (int i = 0; i < m.rows; ++i) {
    double* row = &m.data[static_cast<size_t>(i) * m.cols];
    const double ai = scale * a[i];
    for (int j = 0; j < m.cols; ++j) row[j] += ai * b[j];
  }
}

Vector cg_spd(const LinMap& M, const Vector& rhs, int max_iters, double tol, CgTrace* trace) {
  const size_t n = rhs.size();
  Vector x(n, 0.0);
  Vector r = rhs;
  Vector p = r;
  double rho = dot(r, r);
  if (trace) {
    trace->r.push_back(r);
    trace->rho.push_back(rho);
  }
  for (int k = 0; k < max_iters; ++k) {
    if (rho == 0.0 || std::sqrt(rho) <= tol) break;
    Vector q = M(p);
    if (q.size() != n) throw std::invalid_argument("cg_spd: operator dimension mismatch");
    const double pi = dot(p, q);
    if (pi <= 0.0) break;  // p vanished; SPD map cannot make progress
    const double a = rho / pi;
    axpy(a, p, x);
    Vector rn = r;
    axpy(-a, q, rn);
    const double rho_n = dot(rn, rn);
    const double b = rho_n / rho;
    Vector pn = rn;
    axpy(b, p, pn);
    if (trace) {
      trace->p.push_back(std::move(p));
      trace->q.push_back(std::move(q));
      trace->pi.push_back(pi);
      trace->alpha.push_back(a);
      trace->beta.push_back(b);
      trace->r.push_back(rn);
      trace->rho.push_back(rho_n);
      trace->iters++;
      p = std::move(pn);
    } else {
      p = std::move(pn);
    }
    r = std::move(rn);
    rho = rho_n;
  }
  return x;
}

Vector cg_spd_backward(const LinMap& M, const CgTrace& tr, const Vector& xbar_in,
                       const std::function<void(const Vector&, const Vector&)>& acc_operator) {
  const int K = tr.iters;
  const size_t n = xbar_in.size();
  Vector xbar = xbar_in;
  Vector rbar(n, 0.0);  // adjoint of r_{k+1}
  Vector pbar(n, 0.0);  // adjoint of p_{k+1}
  std::vector<double> rhobar(static_cast<size_t>(K) + 1, 0.0);
  for (int k = K - 1; k >= 0; --k) {
    const Vector& pk = tr.p[k];
    const Vector& qk = tr.q[k];
    const Vector& rk1 = tr.r[k + 1];
    const double rho_k = tr.rho[k];
    const double rho_k1 = tr.rho[k + 1];
    const double a = tr.alpha[k];
    const double b = tr.beta[k];
    const double pi = tr.pi[k];

    // p_{k+1} = r_{k+1} + b p_k
    Vector rbar1 = rbar;
    axpy(1.0, pbar, rbar1);
    const double bbar = dot(pbar, pk);
    Vector pbar_k = pbar;
    scal(b, pbar_k);
    // b = rho_{k+1} / rho_k
    rhobar[k + 1] += bbar / rho_k;
    rhobar[k] -= bbar * rho_k1 / (rho_k * rho_k);
    // rho_{k+1} = r_{k+1} . r_{k+1}
    axpy(2.0 * rhobar[k + 1], rk1, rbar1);
    // r_{k+1} = r_k - a q_k
    Vector rbar_k = rbar1;
    double abar = -dot(rbar1, qk);
    Vector qbar = rbar1;
    scal(-a, qbar);
    // x_{k+1} = x_k + a p_k
    abar += dot(xbar, pk);
    axpy(a, xbar, pbar_k);
    // a = rho_k / pi
    rhobar[k] += abar / pi;
    const double pibar = -abar * rho_k / (pi * pi);
    // pi = p_k . q_k
    axpy(pibar, qk, pbar_k);
    axpy(pibar, pk, qbar);
    // q_k = M p_k  (M symmetric)
    axpy(1.0, M(qbar), pbar_k);
    if (acc_operator) acc_operator(pk, qbar);

    rbar = std::move(rbar_k);
    pbar = std::move(pbar_k);
  }
  // r_0 = rhs, p_0 = r_0, rho_0 = r_0 . r_0
  axpy(2.0 * rhobar[0], tr.r[0], rbar);
  axpy(1.0, pbar, rbar);
  return rbar;
}

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_regularized: beta must be positive");
}

}  // namespace

Vector solve_regularized(const LinMap& apply_A, const LinMap& apply_At, const Vector& b,
                         double beta, int max_iters, double tol) {
  check_beta(beta);
  Vector rhs = apply_At(b);
  LinMap M = [&](const Vector& u) {
    Vector v = apply_At(apply_A(u));
    axpy(beta, u, v);
    return v;
  };
  return cg_spd(M, rhs, max_iters, tol);
}

Vector solve_regularized_shifted(const LinMap& apply_A, const LinMap& apply_At, const Vector& b,
                                 double beta, const Vector& shift, int max_iters, double tol) {
  check_beta(beta);
  Vector rhs = apply_At(b);
  if (rhs.size() != shift.size())
    throw std::invalid_argument("solve_regularized_shifted: shift dimension mismatch");
  axpy(beta, shift, rhs);
  LinMap M = [&](const Vector& u) {
    Vector v = apply_At(apply_A(u));
    axpy(beta, u, v);
    return v;
  };
  return cg_spd(M, rhs, max_iters, tol);
}

}  // namespace mrmap
