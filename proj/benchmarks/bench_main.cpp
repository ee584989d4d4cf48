#include "simtuple/embedding_store.hpp"
#include "simtuple/hungarian.hpp"
#include "simtuple/infotuple.hpp"
#include "simtuple/network.hpp"
#include "simtuple/posterior.hpp"
#include "simtuple/scene_distance.hpp"
#include "simtuple/synth.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace simtuple;

namespace {

const std::vector<Scene>& scenes() {
  static const std::vector<Scene> s = synth_generate(5, 1001);
  return s;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

void BM_Hungarian(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd cost = random_matrix(rng, n, n).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(hungarian_assign(cost).cost);
}
BENCHMARK(BM_Hungarian)->Arg(5)->Arg(11)->Arg(23);

void BM_SceneDistance(benchmark::State& state) {
  const auto& s = scenes();
  std::size_t i = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scene_distance(s[0], s[i]));
    i = i % 1000 + 1;
  }
}
BENCHMARK(BM_SceneDistance);

/// Exact retrieval: distance from one scene to every other.
void BM_ExactScan(benchmark::State& state) {
  const auto& s = scenes();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    for (std::size_t i = 1; i <= n; ++i) benchmark::DoNotOptimize(scene_distance(s[0], s[i]));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_ExactScan)->Arg(100)->Unit(benchmark::kMillisecond);

/// Embedding retrieval: k nearest among stored embeddings.
void BM_EmbeddingKnn(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const EmbeddingStore store(random_matrix(rng, state.range(1), state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(store.knn(0, 10));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * state.range(0)));
}
BENCHMARK(BM_EmbeddingKnn)->Args({1000, 64})->Args({10000, 64});

void BM_Forward(benchmark::State& state) {
  const Architecture arch;
  const EmbeddingModel model = make_model(arch, 3);
  const Eigen::MatrixXd input = network_input(scenes()[0], arch.input_spec());
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, input));
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMicrosecond);

void BM_InfoTupleMi(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::vector<DistanceMarginal> body;
  for (int i = 0; i < state.range(0); ++i) body.push_back(DistanceMarginal::gaussian(u(rng), u(rng)));
  for (auto _ : state) benchmark::DoNotOptimize(infotuple_mi(body, 2.0, 10, 1).mi);
}
BENCHMARK(BM_InfoTupleMi)->Arg(4)->Arg(8);

/// One InfoTuple query over a 1000-object posterior with the default settings.
void BM_InfoTupleSelect(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd M = random_matrix(rng, 3, 1000);
  std::vector<Eigen::MatrixXd> reps;
  for (int b = 0; b < 10; ++b) reps.push_back(M + 0.05 * random_matrix(rng, 3, 1000));
  const OrdinalPosterior posterior(M, 2.0, reps);
  const EmbeddingStore store(random_matrix(rng, 64, 1000), 0);
  const InfoTupleConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(infotuple_select(store, 0, posterior, 0, 9, cfg, ++seed).body);
}
BENCHMARK(BM_InfoTupleSelect)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
