/*
Copyright 2026 The mixbn Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <vector>

#include <benchmark/benchmark.h>

#include "mixbn/mixbn.hpp"

namespace {

using namespace mixbn;

Dataset bench_dataset(int components, int per_component) {
    SynthCondition c;
    c.components = components;
    c.per_component = per_component;
    c.seed = 11;
    Rng rng(c.seed);
    const GroundTruth truth = generate_model(c, rng);
    return generate_dataset(truth, c, rng);
}

void BM_FamilyScore(benchmark::State& state) {
    const Dataset d = bench_dataset(1, static_cast<int>(state.range(0)));
    const ScatterStats stats = ScatterStats::from_rows(d.y);
    NodeMask parents = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(family_score(stats, 4, parents, {}));
        parents = (parents + 1) & 0xF;
    }
}
BENCHMARK(BM_FamilyScore)->Arg(100)->Arg(1000);

void BM_GraphScore(benchmark::State& state) {
    const Dataset d = bench_dataset(1, 500);
    Rng rng(3);
    const Dag g = random_dag(d.nodes(), 0.5, rng);
    for (auto _ : state) benchmark::DoNotOptimize(graph_score(g, d.y));
}
BENCHMARK(BM_GraphScore);

void BM_PolyaGamma(benchmark::State& state) {
    Rng rng(5);
    const double c = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pg_sample(c, rng));
}
BENCHMARK(BM_PolyaGamma)->Arg(0)->Arg(1)->Arg(10);

void BM_GibbsSweep(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const Dataset d = bench_dataset(k, 300);
    FitConfig config;
    config.k = k;
    config.seed = 9;
    Rng rng(config.seed);
    ChainState s = initial_state(d, config, rng);
    for (auto _ : state) s = gibbs_sweep(s, d, config, rng);
    state.SetItemsProcessed(state.iterations() * d.rows());
}
BENCHMARK(BM_GibbsSweep)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
