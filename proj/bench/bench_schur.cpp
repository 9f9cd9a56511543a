#include "gnscert/poly.hpp"
#include "gnscert/schur.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace gnscert;

// Coefficients of a single moment block M_d in n variables: one matrix per monomial of degree <= 2d.
struct Instance {
  BlockCoefficients coeffs;
  std::vector<Eigen::MatrixXd> W;
  int m = 0;
};

Instance make_instance(int n, int d) {
  MonomialBasis rows(n, d);
  MonomialBasis all(n, 2 * d);
  Instance inst;
  inst.m = all.size();
  inst.coeffs.assign(1, std::vector<SparseSym>(inst.m));
  for (int r = 0; r < rows.size(); ++r)
    for (int c = 0; c < rows.size(); ++c)
      inst.coeffs[0][all.index_of(rows[r] + rows[c])].push_back({r, c, 1.0});

  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd g(rows.size(), rows.size());
  for (int i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
  inst.W.push_back(g * g.transpose() / rows.size());
  return inst;
}

void BM_SchurReference(benchmark::State& state) {
  Instance inst = make_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(schur_reference(inst.coeffs, inst.W, inst.m));
  state.counters["m"] = inst.m;
}

void BM_SchurParallel(benchmark::State& state) {
  Instance inst = make_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(schur_parallel(inst.coeffs, inst.W, inst.m));
  state.counters["m"] = inst.m;
}

}  // namespace

BENCHMARK(BM_SchurReference)->Args({2, 3})->Args({2, 5})->Args({3, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurParallel)->Args({2, 3})->Args({2, 5})->Args({3, 3})->Args({3, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
