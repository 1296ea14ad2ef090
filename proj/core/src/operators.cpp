#include "mrmap/operators.hpp"

#include <algorithm>
#include <cmath>

namespace mrmap {

ForwardOperator ForwardOperator::identity(int p) {
  ForwardOperator op;
  op.kind = Kind::Identity;
  op.p = p;
  op.m = p;
  return op;
}

ForwardOperator ForwardOperator::mask(int p, std::vector<int> indices) {
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= p)
      throw std::invalid_argument("ForwardOperator::mask: index out of range");
    if (i > 0 && indices[i] <= indices[i - 1])
      throw std::invalid_argument("ForwardOperator::mask: indices must be strictly increasing");
  }
  ForwardOperator op;
  op.kind = Kind::Mask;
  op.p = p;
  op.m = static_cast<int>(indices.size());
  op.indices = std::move(indices);
  return op;
}

ForwardOperator ForwardOperator::from_dense(Matrix m) {
  ForwardOperator op;
  op.kind = Kind::Dense;
  op.p = m.cols;
  op.m = m.rows;
  op.dense = std::move(m);
  return op;
}

Vector apply(const ForwardOperator& op, const Vector& x) {
  if (static_cast<int>(x.size()) != op.p) throw std::invalid_argument("apply: length mismatch");
  switch (op.kind) {
    case ForwardOperator::Kind::Identity:
      return x;
    case ForwardOperator::Kind::Mask: {
      Vector y(op.m);
      for (int i = 0; i < op.m; ++i) y[i] = x[op.indices[i]];
      return y;
    }
    case ForwardOperator::Kind::Dense:
      return matvec(op.dense, x);
  }
  throw std::logic_error("apply: bad kind");
}

Vector apply_adjoint(const ForwardOperator& op, const Vector& y) {
  if (static_cast<int>(y.size()) != op.m)
    throw std::invalid_argument("apply_adjoint: length mismatch");
  switch (op.kind) {
    case ForwardOperator::Kind::Identity:
      return y;
    case ForwardOperator::Kind::Mask: {
      Vector x(op.p, 0.0);
      for (int i = 0; i < op.m; ++i) x[op.indices[i]] = y[i];
      return x;
    }
    case ForwardOperator::Kind::Dense:
      return matvec_t(op.dense, y);
  }
  throw std::logic_error("apply_adjoint: bad kind");
}

ForwardOperator sample_mask(int p, double fraction, RngStream& rng) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("sample_mask: fraction must be in (0, 1]");
  const int m = static_cast<int>(std::ceil(fraction * p));
  if (m < 1) throw std::invalid_argument("sample_mask: empty mask");
  std::vector<int> pool(p);
  for (int i = 0; i < p; ++i) pool[i] = i;
  for (int i = 0; i < m; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<uint64_t>(p - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> indices(pool.begin(), pool.begin() + m);
  std::sort(indices.begin(), indices.end());
  return ForwardOperator::mask(p, std::move(indices));
}

LatentDatum make_latent(const Vector& x, const ForwardOperator& op, double sigma, RngStream& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("make_latent: sigma must be positive");
  LatentDatum datum;
  datum.op = op;
  datum.sigma = sigma;
  datum.d = apply(op, x);
  for (double& v : datum.d) v += sigma * rng.next_normal();
  return datum;
}

}  // namespace mrmap
