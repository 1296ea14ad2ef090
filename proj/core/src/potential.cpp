#include "mrmap/potential.hpp"

#include <cmath>

namespace mrmap {

double act(double t) { return t > 0.0 ? 0.5 * t * t : 0.0; }

double act_prime(double t) { return t > 0.0 ? t : 0.0; }

Vector act(const Vector& t) {
  Vector out(t.size());
  for (size_t i = 0; i < t.size(); ++i) out[i] = act(t[i]);
  return out;
}

Vector act_prime(const Vector& t) {
  Vector out(t.size());
  for (size_t i = 0; i < t.size(); ++i) out[i] = act_prime(t[i]);
  return out;
}

void validate(const PotentialParams& params) {
  if (params.ell < 1) throw std::invalid_argument("PotentialParams: ell must be >= 1");
  if (static_cast<int>(params.layers.size()) != params.ell)
    throw std::invalid_argument("PotentialParams: layer count != ell");
  if (params.K.rows != params.p || params.K.cols != params.q)
    throw std::invalid_argument("PotentialParams: K must be p x q");
  for (const auto& layer : params.layers) {
    if (layer.K.rows != params.q || layer.K.cols != params.q ||
        static_cast<int>(layer.b.size()) != params.q ||
        static_cast<int>(layer.w.size()) != params.q)
      throw std::invalid_argument("PotentialParams: layer shape mismatch");
  }
  if (static_cast<int>(params.r.size()) != params.q ||
      params.W_omega.rows != params.q || params.W_omega.cols != params.q ||
      static_cast<int>(params.b_omega.size()) != params.q)
    throw std::invalid_argument("PotentialParams: r/omega shape mismatch");
  if (!(params.beta > 0.0) || !(params.h > 0.0) || !(params.sigma > 0.0))
    throw std::invalid_argument("PotentialParams: beta, h, sigma must be positive");
}

double layer_energy(const PotentialParams& params, int j, const Vector& u_j) {
  if (j < 0 || j >= params.ell) throw std::out_of_range("layer_energy: layer index");
  const auto& layer = params.layers[j];
  Vector s = matvec(layer.K, u_j);
  axpy(1.0, layer.b, s);
  double e = 0.0;
  for (size_t i = 0; i < s.size(); ++i) e += layer.w[i] * act(s[i]);
  return e;
}

double potential_value(const PotentialParams& params, const std::vector<Vector>& u) {
  if (static_cast<int>(u.size()) != params.ell + 1)
    throw std::invalid_argument("potential_value: trajectory must have ell+1 blocks");
  double kinetic = 0.0;
  for (int j = 1; j <= params.ell; ++j) {
    Vector diff = vsub(u[j], u[j - 1]);
    kinetic += 0.5 * dot(diff, diff);
  }
  double energy = 0.0;
  for (int j = 0; j < params.ell; ++j) energy += layer_energy(params, j, u[j]);
  return kinetic + params.h * params.h * energy + dot(params.r, u[params.ell]);
}

std::vector<Vector> potential_grad_u(const PotentialParams& params, const std::vector<Vector>& u) {
  if (static_cast<int>(u.size()) != params.ell + 1)
    throw std::invalid_argument("potential_grad_u: trajectory must have ell+1 blocks");
  const int ell = params.ell;
  const double h2 = params.h * params.h;
  std::vector<Vector> grad(ell + 1, Vector(params.q, 0.0));
  for (int j = 0; j <= ell; ++j) {
    Vector g(params.q, 0.0);
    if (j > 0) axpy(1.0, vsub(u[j], u[j - 1]), g);
    if (j < ell) axpy(-1.0, vsub(u[j + 1], u[j]), g);
    if (j < ell) {
      const auto& layer = params.layers[j];
      Vector s = matvec(layer.K, u[j]);
      axpy(1.0, layer.b, s);
      Vector force(params.q);
      for (int i = 0; i < params.q; ++i) force[i] = act_prime(s[i]) * layer.w[i];
      axpy(h2, matvec_t(layer.K, force), g);
    }
    if (j == ell) axpy(1.0, params.r, g);
    grad[j] = std::move(g);
  }
  return grad;
}

}  // namespace mrmap
