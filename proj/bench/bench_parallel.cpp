// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "detproc/dpp.hpp"
#include "detproc/kernels.hpp"
#include "detproc/parallel.hpp"
#include "detproc/permanental.hpp"
#include "detproc/planar.hpp"
#include "detproc/ust.hpp"

using namespace detproc;

namespace {

ComplexMatrix random_matrix(Eigen::Index n, std::uint64_t seed) {
  RandomStream s(seed);
  ComplexMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = sample_complex_normal(s);
  return m;
}

const DiscretizedKernel& radial_grid() {
  static const DiscretizedKernel grid =
      discretize_radial_kernel(RadialKernelSpec::ginibre(6), 0.1, 4.5);
  return grid;
}

Graph grid_graph(std::size_t side) {
  std::vector<std::string> names;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < side * side; ++i) names.push_back("v" + std::to_string(i));
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t v = r * side + c;
      if (c + 1 < side) edges.push_back({v, v + 1, 1.0});
      if (r + 1 < side) edges.push_back({v, v + side, 1.0});
    }
  }
  return Graph(names, edges);
}

void BM_permanent_parallel(benchmark::State& state) {
  const ComplexMatrix m = random_matrix(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(permanent(m));
}

void BM_permanent_serial(benchmark::State& state) {
  const ComplexMatrix m = random_matrix(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(permanent_serial(m));
}

// Draws share one precomputed spectrum; only the per-sample work is timed.
template <class Batch>
void run_batches(benchmark::State& state, Batch&& batch) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(batch(count));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_dpp_batch_parallel(benchmark::State& state) {
  const DiscretizedKernel& g = radial_grid();
  run_batches(state, [&](std::size_t n) {
    return generate_batch(n, RandomStream(2), [&](RandomStream& s) {
      return sample_dpp(g.spectrum, g.ground, s);
    });
  });
}

void BM_dpp_batch_serial(benchmark::State& state) {
  const DiscretizedKernel& g = radial_grid();
  run_batches(state, [&](std::size_t n) {
    return generate_batch_serial(n, RandomStream(2), [&](RandomStream& s) {
      return sample_dpp(g.spectrum, g.ground, s);
    });
  });
}

void BM_permanental_batch_parallel(benchmark::State& state) {
  const DiscretizedKernel& g = radial_grid();
  run_batches(state, [&](std::size_t n) {
    return generate_batch(n, RandomStream(3), [&](RandomStream& s) {
      return sample_permanental(g.spectrum, g.ground, s);
    });
  });
}

void BM_permanental_batch_serial(benchmark::State& state) {
  const DiscretizedKernel& g = radial_grid();
  run_batches(state, [&](std::size_t n) {
    return generate_batch_serial(n, RandomStream(3), [&](RandomStream& s) {
      return sample_permanental(g.spectrum, g.ground, s);
    });
  });
}

void BM_ust_batch_parallel(benchmark::State& state) {
  const Graph g = grid_graph(5);
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_batch(count, RandomStream(4), [&](RandomStream& s) {
      return sample_ust(g, s);
    }));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ust_batch_serial(benchmark::State& state) {
  const Graph g = grid_graph(5);
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_batch_serial(count, RandomStream(4), [&](RandomStream& s) {
      return sample_ust(g, s);
    }));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_permanent_parallel)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_permanent_serial)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dpp_batch_parallel)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_dpp_batch_serial)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_permanental_batch_parallel)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_permanental_batch_serial)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ust_batch_parallel)->Arg(200)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ust_batch_serial)->Arg(200)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
