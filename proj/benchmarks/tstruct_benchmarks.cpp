#include <benchmark/benchmark.h>

#include "tstruct/adjacency.hpp"
#include "tstruct/dsf.hpp"
#include "tstruct/ensemble.hpp"
#include "tstruct/lbfgsb.hpp"
#include "tstruct/metrics.hpp"
#include "tstruct/rng.hpp"
#include "tstruct/subsample.hpp"
#include "tstruct/synthdata.hpp"

namespace tstruct {
namespace {

Matrix random_weights(int d, Rng& rng) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = i == j ? 0.0 : uniform(rng, -0.5, 0.5);
  }
  return m;
}

Matrix sample_data(int d, int n, std::uint64_t seed) {
  Rng rng(seed);
  const BinaryDag dag = sample_er_dag(d, 2.0 * d, rng);
  return simulate(sample_index_model(dag, rng), n, rng);
}

void BM_MatrixExp(benchmark::State& state) {
  Rng rng(1);
  const Matrix m = random_weights(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exp(m));
}
BENCHMARK(BM_MatrixExp)->Arg(5)->Arg(10)->Arg(20)->Arg(50);

void BM_AcyclicityGrad(benchmark::State& state) {
  Rng rng(2);
  const WeightedAdjacency a(random_weights(static_cast<int>(state.range(0)), rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(acyclicity_h(a));
    benchmark::DoNotOptimize(acyclicity_h_grad(a));
  }
}
BENCHMARK(BM_AcyclicityGrad)->Arg(5)->Arg(20);

// Objective + gradient for one learner; range(0) = d, range(1) = n.
void BM_DsfObjectiveMlp(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Matrix x = sample_data(d, static_cast<int>(state.range(1)), 3);
  DsfHyper hyper;
  const DsfParams p = DsfParams::initialize(DsfVariant::kMlp, d, hyper, 4);
  Vector grad;
  for (auto _ : state) benchmark::DoNotOptimize(dsf_objective(p, x, 10.0, 1.0, hyper, &grad));
  state.SetItemsProcessed(state.iterations() * x.rows());
}
BENCHMARK(BM_DsfObjectiveMlp)->Args({5, 333})->Args({5, 1000})->Args({10, 1000});

void BM_DsfObjectiveLinear(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Matrix x = sample_data(d, 1000, 5);
  DsfHyper hyper;
  const DsfParams p = DsfParams::initialize(DsfVariant::kLinear, d, hyper, 6);
  Vector grad;
  for (auto _ : state) benchmark::DoNotOptimize(dsf_objective(p, x, 10.0, 1.0, hyper, &grad));
}
BENCHMARK(BM_DsfObjectiveLinear)->Arg(5)->Arg(20);

void BM_LbfgsbRosenbrock(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DifferentiableObjective f = [](const Vector& x, Vector& g) {
    double v = 0.0;
    g.setZero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double a = x(i + 1) - x(i) * x(i), b = 1.0 - x(i);
      v += 100.0 * a * a + b * b;
      g(i) += -400.0 * x(i) * a - 2.0 * b;
      g(i + 1) += 200.0 * a;
    }
    return v;
  };
  const Vector x0 = Vector::Constant(n, -1.0);
  const BoxBounds bounds = BoxBounds::unbounded(n);
  for (auto _ : state) benchmark::DoNotOptimize(lbfgsb_minimize(f, x0, bounds, {}));
}
BENCHMARK(BM_LbfgsbRosenbrock)->Arg(10)->Arg(100);

void BM_CombinedLoss(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const Matrix x = sample_data(5, 1000 / K, 7);
  ModelSpec spec;
  spec.K = K;
  const DStructModel model = make_model(spec, 8);
  Vector grad;
  for (auto _ : state) benchmark::DoNotOptimize(combined_loss(model, 0, x, &grad));
}
BENCHMARK(BM_CombinedLoss)->Arg(2)->Arg(3)->Arg(5);

void BM_BetaSubsample(benchmark::State& state) {
  const Matrix x = sample_data(5, static_cast<int>(state.range(0)), 9);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(beta_subsample(x, 3, ++seed));
}
BENCHMARK(BM_BetaSubsample)->Arg(1000)->Arg(10000);

void BM_Shd(benchmark::State& state) {
  Rng rng(10);
  const int d = static_cast<int>(state.range(0));
  const BinaryDag a = sample_er_dag(d, 2.0 * d, rng), b = sample_er_dag(d, 2.0 * d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(confusion_rates(a, b));
}
BENCHMARK(BM_Shd)->Arg(5)->Arg(50);

}  // namespace
}  // namespace tstruct

BENCHMARK_MAIN();
