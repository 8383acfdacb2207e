#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "tcx/bipartite.hpp"
#include "tcx/complexity.hpp"
#include "tcx/ingest.hpp"
#include "tcx/synthetic.hpp"

namespace {

std::string corpus_text(std::size_t records, std::size_t actors, std::size_t categories) {
    tcx::synthetic::CorpusSpec spec;
    spec.records = records;
    spec.actors = actors;
    spec.categories = categories;
    spec.regions = 47;
    spec.seed = 3;
    return tcx::synthetic::corpus_csv(spec);
}

void BM_ParseRecords(benchmark::State& state) {
    const auto text = corpus_text(static_cast<std::size_t>(state.range(0)), 2000, 124);
    for (auto _ : state) {
        auto parsed = tcx::parse_records(text);
        benchmark::DoNotOptimize(parsed.records.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseRecords)->Arg(10'000)->Arg(100'000);

void BM_AllocateWeights(benchmark::State& state) {
    const auto records = tcx::parse_records(corpus_text(static_cast<std::size_t>(state.range(0)), 5000, 124)).records;
    const auto ipc3 = tcx::Concordance::ipc3();
    const auto level = state.range(1) == 0 ? tcx::Level::Corporate : tcx::Level::Regional;
    for (auto _ : state) {
        auto w = tcx::allocate_weights(records, ipc3, level);
        benchmark::DoNotOptimize(w.weights.nonzeros());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AllocateWeights)->Args({100'000, 0})->Args({100'000, 1});

tcx::SpecializationMatrix random_network(std::size_t actors, std::size_t categories, double density) {
    std::mt19937_64 rng(17);
    std::bernoulli_distribution edge(density);
    std::vector<std::vector<int>> m(actors, std::vector<int>(categories, 0));
    for (std::size_t a = 0; a < actors; ++a) {
        m[a][a % categories] = 1;  // keeps every row and column occupied
        m[a][(a + 1) % categories] = 1;
        for (auto& v : m[a]) v = v || edge(rng);
    }
    return tcx::SpecializationMatrix::from_dense(m);
}

void BM_TciEigenDense(benchmark::State& state) {
    const auto m = random_network(2000, static_cast<std::size_t>(state.range(0)), 0.08);
    for (auto _ : state) {
        auto r = tcx::tci_eigen(m);
        benchmark::DoNotOptimize(r.tci.data());
    }
}
BENCHMARK(BM_TciEigenDense)->Arg(35)->Arg(124)->Unit(benchmark::kMillisecond);

void BM_TciEigenPower(benchmark::State& state) {
    const auto m = random_network(2000, static_cast<std::size_t>(state.range(0)), 0.08);
    tcx::TciOptions opts;
    opts.dense_limit = 0;
    for (auto _ : state) {
        auto r = tcx::tci_eigen(m, opts);
        benchmark::DoNotOptimize(r.tci.data());
    }
}
BENCHMARK(BM_TciEigenPower)->Arg(124)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
