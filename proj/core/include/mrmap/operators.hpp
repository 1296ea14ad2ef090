#pragma once

#include "mrmap/linalg.hpp"
#include "mrmap/samplers.hpp"

namespace mrmap {

/// Forward operator P: identity, index-selection mask, or dense matrix.
/// Masks store their index list only; applies cost O(m).
struct ForwardOperator {
  enum class Kind { Identity, Mask, Dense };

  Kind kind = Kind::Identity;
  int p = 0;  // input dimension
  int m = 0;  // output dimension
  std::vector<int> indices;  // Mask only; strictly increasing, unique
  Matrix dense;              // Dense only, m x p

  static ForwardOperator identity(int p);
  static ForwardOperator mask(int p, std::vector<int> indices);
  static ForwardOperator from_dense(Matrix m);
};

Vector apply(const ForwardOperator& op, const Vector& x);
Vector apply_adjoint(const ForwardOperator& op, const Vector& y);

/// Mask with ceil(fraction * p) indices drawn uniformly without replacement
/// (partial Fisher-Yates), deterministic given the stream state.
ForwardOperator sample_mask(int p, double fraction, RngStream& rng);

struct LatentDatum {
  Vector d;
  ForwardOperator op;
  double sigma = 0.0;
};

/// d = P x + sigma * z with z standard normal per entry.
LatentDatum make_latent(const Vector& x, const ForwardOperator& op, double sigma, RngStream& rng);

}  // namespace mrmap
