#include <benchmark/benchmark.h>

#include "pinn/assembly.hpp"
#include "pinn/network.hpp"
#include "pinn/numkit.hpp"
#include "pinn/problems.hpp"

using namespace pinn;

namespace {

NetworkParams random_net(std::size_t d_in, std::size_t d_out, std::size_t width) {
  Rng rng(0, 100);
  return init_params({d_in, d_out, width}, rng);
}

std::vector<NetworkParams> problem_params(const PdeProblem& p, std::size_t width) {
  Rng rng(0, 100);
  std::vector<NetworkParams> out;
  for (const auto& f : p.fields) out.push_back(init_params({p.domain.coord_dim(), f.d_out, width}, rng));
  return out;
}

}  // namespace

static void BM_EvalParamJet(benchmark::State& state) {
  const NetworkParams net = random_net(3, 1, static_cast<std::size_t>(state.range(0)));
  const std::vector<double> x{0.3, 0.6, 0.2};
  Jet jet;
  ParamJet pjet;
  for (auto _ : state) {
    eval_param_jet(net, x, jet, pjet);
    benchmark::DoNotOptimize(pjet);
  }
}
BENCHMARK(BM_EvalParamJet)->Arg(32)->Arg(64);

static void BM_EvalJetBatch(benchmark::State& state) {
  const NetworkParams net = random_net(3, 1, 64);
  Rng rng(1, 0);
  const DenseMatrix points = uniform_points(rng, static_cast<std::size_t>(state.range(0)), 3);
  JetBatch batch;
  for (auto _ : state) {
    eval_jet_batch(net, points, batch);
    benchmark::DoNotOptimize(batch.hessians.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvalJetBatch)->Arg(1000)->Arg(10000);

static void BM_Assemble(benchmark::State& state) {
  const PdeProblem p = state.range(0) == 0 ? poisson() : stokes();
  const Collocation col = draw_collocation(p, {1000, 100}, 1, 2);
  const auto params = problem_params(p, state.range(0) == 0 ? 64 : 32);
  for (auto _ : state) {
    const ResidualSystem sys = assemble(p, col, params, true);
    benchmark::DoNotOptimize(sys.J.data());
  }
  state.SetLabel(p.name);
}
BENCHMARK(BM_Assemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_GramMatrix(benchmark::State& state) {
  const PdeProblem p = poisson();
  const Collocation col = draw_collocation(p, {1000, 100}, 1, 2);
  const ResidualSystem sys = assemble(p, col, problem_params(p, 64), true);
  for (auto _ : state) {
    const DenseMatrix g = gram_matrix(sys, 1e-5);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_GramMatrix)->Unit(benchmark::kMillisecond);

static void BM_SolveSpd(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(2, 0);
  const DenseMatrix a = uniform_points(rng, static_cast<std::size_t>(2 * n), static_cast<std::size_t>(n));
  const DenseMatrix g = a.transpose() * a + 1e-5 * DenseMatrix::Identity(n, n);
  const Vector b = Vector::Ones(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd(g, b).data());
}
BENCHMARK(BM_SolveSpd)->Arg(321)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
