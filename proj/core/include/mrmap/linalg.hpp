#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace mrmap {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

// Basic vector kernels.
double dot(const Vector& a, const Vector& b);
double nrm2(const Vector& a);
void axpy(double a, const Vector& x, Vector& y);  // y += a*x
void scal(double a, Vector& x);
Vector vadd(const Vector& a, const Vector& b);
Vector vsub(const Vector& a, const Vector& b);
bool all_finite(const Vector& a);
bool all_finite(const Matrix& m);

// Dense matrix kernels.
Vector matvec(const Matrix& m, const Vector& x);    // m * x
Vector matvec_t(const Matrix& m, const Vector& y);  // m^T * y
void outer_acc(Matrix& m, const Vector& a, const Vector& b, double scale = 1.0);  // m += scale * a b^T

using LinMap = std::function<Vector(const Vector&)>;

/// Record of a conjugate-gradient run, sufficient to replay the iteration
/// in reverse for exact differentiation of the truncated solve.
struct CgTrace {
  std::vector<Vector> p;  // search directions p_0..p_{K-1}
  std::vector<Vector> q;  // q_k = M p_k
  std::vector<Vector> r;  // residuals r_0..r_K
  std::vector<double> rho;    // rho_k = r_k.r_k, k = 0..K
  std::vector<double> pi;     // p_k.q_k
  std::vector<double> alpha;  // step sizes
  std::vector<double> beta;   // direction updates
  int iters = 0;
};

/// CG for an SPD map M starting from zero. Stops after max_iters or once the
/// residual norm drops to tol. When trace is given, every iterate is recorded.
Vector cg_spd(const LinMap& M, const Vector& rhs, int max_iters, double tol, CgTrace* trace = nullptr);

/// Reverse sweep of cg_spd. Returns the adjoint of rhs; acc_operator is called
/// once per recorded iteration with (p_k, qbar_k) so the caller can accumulate
/// adjoints of the operator's own parameters.
Vector cg_spd_backward(const LinMap& M, const CgTrace& trace, const Vector& xbar,
                       const std::function<void(const Vector&, const Vector&)>& acc_operator);

/// Solves (A^T A + beta I) u = A^T b by CG on the normal equations.
Vector solve_regularized(const LinMap& apply_A, const LinMap& apply_At, const Vector& b,
                         double beta, int max_iters = 8, double tol = 1e-10);

/// Solves (A^T A + beta I) u = A^T b + beta * shift.
Vector solve_regularized_shifted(const LinMap& apply_A, const LinMap& apply_At, const Vector& b,
                                 double beta, const Vector& shift, int max_iters = 8,
                                 double tol = 1e-10);

}  // namespace mrmap
