#include "eog/controller.hpp"
#include "eog/evidence.hpp"
#include "eog/graph.hpp"
#include "eog/policy.hpp"
#include "eog/scenario.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace eog;

namespace {

ExplanatoryGraph random_labeled_graph(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ExplanatoryGraph es;
    std::vector<EntityId> ids;
    for (int i = 0; i < n; ++i) {
        ids.push_back({"otel-demo", "Service", "s" + std::to_string(i)});
        es.set_belief(ids.back(), {static_cast<Label>(rng() % 4), "evidence", 0});
    }
    for (int e = 0; e < n * 2; ++e) {
        const int a = static_cast<int>(rng() % n);
        const int b = static_cast<int>(rng() % n);
        if (a < b) es.upsert_edge({ids[a], ids[b], "c", "e"});
    }
    return es;
}

void BM_ComputeFrontier(benchmark::State& state) {
    const auto es = random_labeled_graph(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_frontier(es));
    }
}
BENCHMARK(BM_ComputeFrontier)->Arg(8)->Arg(32)->Arg(128);

void BM_GetContext(benchmark::State& state) {
    const auto [snapshot, gt] = generate_flash_sale();
    ExplanatoryGraph es;
    const auto [window, anchors] = select_window(snapshot.alerts);
    const EntityId gateway{"otel-demo", "Service", "gateway"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(get_context(snapshot, es, gateway, window, {}, 1, 3, 2));
    }
}
BENCHMARK(BM_GetContext);

void BM_FlashSaleInvestigation(benchmark::State& state) {
    const auto [snapshot, gt] = generate_flash_sale();
    for (auto _ : state) {
        OraclePolicy oracle;
        BudgetConfig budget;
        benchmark::DoNotOptimize(run_investigation(snapshot, std::nullopt, oracle, budget));
    }
}
BENCHMARK(BM_FlashSaleInvestigation);

void BM_GenerateScenario(benchmark::State& state) {
    ScenarioSpec spec;
    spec.seed = 3;
    spec.n_services = static_cast<int>(state.range(0));
    spec.fault = FaultKind::TrafficSurge;
    spec.hidden_edge_fraction = 0.25;
    spec.cascade_depth = 2;
    spec.noise_level = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate(spec));
    }
}
BENCHMARK(BM_GenerateScenario)->Arg(4)->Arg(12);

} // namespace

BENCHMARK_MAIN();
