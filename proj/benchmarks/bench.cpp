#include <benchmark/benchmark.h>

#include "mrmap/flow.hpp"
#include "mrmap/grad.hpp"
#include "mrmap/train.hpp"

namespace {

using namespace mrmap;

struct Fixture {
  PotentialParams params;
  LatentDatum datum;
  Vector x;

  Fixture(int p, int q, int ell) {
    params = init_params(p, q, ell, 0.1, 1.0, 1.0, 42);
    RngStream rng(42, 7);
    x.resize(p);
    for (double& v : x) v = rng.next_normal();
    ForwardOperator op = ForwardOperator::identity(p);
    datum = make_latent(x, op, 0.1, rng);
  }
};

void BM_RunFlow(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 5);
  for (auto _ : state) {
    FlowTrajectory traj = run_flow(f.params, f.datum);
    benchmark::DoNotOptimize(traj.q_vec.data());
  }
}
BENCHMARK(BM_RunFlow)->Args({2, 128})->Args({64, 128});

void BM_LossAndGrad(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 5);
  for (auto _ : state) {
    LossAndGrad lg = loss_and_grad(f.params, f.datum, f.x, 1.0, 1.0);
    benchmark::DoNotOptimize(lg.loss.total);
  }
}
BENCHMARK(BM_LossAndGrad)->Args({2, 128})->Args({64, 128});

void BM_CgSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(1, 0);
  Matrix A(n, n);
  for (double& v : A.data) v = rng.next_normal();
  Vector b(n);
  for (double& v : b) v = rng.next_normal();
  LinMap M = [&](const Vector& u) {
    Vector v = matvec_t(A, matvec(A, u));
    axpy(0.1, u, v);
    return v;
  };
  Vector rhs = matvec_t(A, b);
  for (auto _ : state) {
    Vector x = cg_spd(M, rhs, 8, 0.0);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_CgSolve)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
