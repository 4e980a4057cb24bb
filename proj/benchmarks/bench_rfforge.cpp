#include <benchmark/benchmark.h>

#include <filesystem>
#include <algorithm>

#include "rfforge/channel.hpp"
#include "rfforge/dataio.hpp"
#include "rfforge/features.hpp"
#include "rfforge/gbtree.hpp"
#include "rfforge/harness.hpp"
#include "rfforge/modem.hpp"
#include "rfforge/random.hpp"

using namespace rfforge;

namespace {

ExperimentConfig impaired(std::uint32_t length) {
    ExperimentConfig c;
    c.length = length;
    c.impairments.sigma_clk = 0.01;
    c.impairments.tau = 4.0;
    return c;
}

void BM_featurize(benchmark::State& state) {
    const auto len = static_cast<std::uint32_t>(state.range(0));
    const IqExample ex = generate_example(impaired(len), 1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(featurize(ex.samples));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_featurize)->Arg(128)->Arg(1024)->Arg(4096);

void BM_generate_example(benchmark::State& state) {
    const ExperimentConfig cfg = impaired(static_cast<std::uint32_t>(state.range(0)));
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(generate_example(cfg, 1, i++));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_generate_example)->Arg(1024);

void BM_best_split(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RandomStream r(2, 0);
    std::vector<float> v(n);
    std::vector<double> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = static_cast<float>(r.normal());
        g[i] = r.normal();
        h[i] = r.uniform(0.01, 1.0);
    }
    std::sort(v.begin(), v.end());
    for (auto _ : state) benchmark::DoNotOptimize(gbt::best_split(v, g, h, {}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_best_split)->Arg(1000)->Arg(40000);

void BM_train_rounds(benchmark::State& state) {
    ExperimentConfig cfg = impaired(256);
    cfg.classes = normal_classes();
    cfg.n_examples = static_cast<std::uint64_t>(state.range(0));
    const FeatureTable t = generate_features(cfg, 3);
    gbt::TrainConfig tc;
    tc.rounds = 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gbt::train({t.values, t.rows, t.cols}, t.labels, 11, tc));
    }
    state.SetItemsProcessed(state.iterations() * tc.rounds);
}
BENCHMARK(BM_train_rounds)->Arg(4400)->Unit(benchmark::kMillisecond);

void BM_rscd_roundtrip(benchmark::State& state) {
    ExperimentConfig cfg = impaired(1024);
    cfg.n_examples = 240;
    const auto path = (std::filesystem::temp_directory_path() / "rfforge_bench.rscd").string();
    const auto m = make_manifest(cfg, 4);
    std::vector<IqExample> ex;
    for (std::uint64_t i = 0; i < cfg.n_examples; ++i) ex.push_back(generate_example(cfg, 4, i));
    for (auto _ : state) {
        write_dataset(path, m, ex);
        benchmark::DoNotOptimize(read_dataset(path));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(rscd_file_bytes(cfg.n_examples, cfg.length)));
    std::filesystem::remove(path);
    std::filesystem::remove(manifest_path(path));
}
BENCHMARK(BM_rscd_roundtrip)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
