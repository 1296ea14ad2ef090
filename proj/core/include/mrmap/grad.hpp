#pragma once

#include "mrmap/flow.hpp"

namespace mrmap {

/// Adjoints for every learnable in PotentialParams, congruent shapes.
struct ParamGradient {
  Matrix K;
  struct Layer {
    Matrix K;
    Vector b;
    Vector w;
  };
  std::vector<Layer> layers;
  Vector r;
  Matrix W_omega;
  Vector b_omega;

  static ParamGradient zeros_like(const PotentialParams& params);
  void accumulate(const ParamGradient& other, double scale = 1.0);
  void scale_all(double s);
  bool finite() const;
};

struct LossParts {
  double re = 0.0;
  double rp = 0.0;
  double rc = 0.0;
  double total = 0.0;
};

struct LossAndGrad {
  LossParts loss;
  ParamGradient grad;
  FlowTrajectory traj;
};

/// Loss of the unrolled forward pass on one sample (plain squared norms,
/// batch averaging is the caller's job) and its exact gradient with respect
/// to every learnable, obtained by reversing the recorded computation
/// including both truncated CG solves.
LossAndGrad loss_and_grad(const PotentialParams& params, const LatentDatum& datum,
                          const Vector& x_true, double alpha, double gamma, int cg_iters = 8);

/// Max over all learnable entries of the relative mismatch between the
/// analytic gradient and a central finite difference of the loss.
double fd_check(const PotentialParams& params, const LatentDatum& datum, const Vector& x_true,
                double alpha, double gamma, double step, int cg_iters = 8);

/// Pointers to every learnable scalar, in a fixed order shared between
/// PotentialParams and ParamGradient.
std::vector<double*> flatten_learnables(PotentialParams& params);
std::vector<double*> flatten_learnables(ParamGradient& grad);

}  // namespace mrmap
