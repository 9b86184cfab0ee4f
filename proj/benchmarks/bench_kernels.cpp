#include <benchmark/benchmark.h>

#include <vector>

#include "dmh/codes.hpp"
#include "dmh/data.hpp"
#include "dmh/eval.hpp"
#include "dmh/optimizer.hpp"
#include "dmh/random.hpp"

namespace {

dmh::PackedCodes random_packed(std::size_t n, std::size_t c, std::uint64_t seed) {
    dmh::Rng rng(seed);
    dmh::CodeMatrix B;
    B.bits.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < B.bits.size(); ++i) {
        B.bits(i) = static_cast<std::uint8_t>(rng.below(2));
    }
    return dmh::PackedCodes::pack(B);
}

void BM_DistancesToAll(benchmark::State& state) {
    const auto c = static_cast<std::size_t>(state.range(0));
    const auto db = random_packed(100000, c, 1);
    const auto q = random_packed(1, c, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dmh::distances_to_all(q.row(0), db));
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_DistancesToAll)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

void BM_RankByHamming(benchmark::State& state) {
    const auto db = random_packed(100000, 64, 3);
    const auto q = random_packed(1, 64, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dmh::rank_by_hamming(q.row(0), db));
    }
}
BENCHMARK(BM_RankByHamming);

struct Instance {
    std::vector<dmh::ViewMatrix> views;
    std::vector<dmh::ViewParams> params;
    std::vector<dmh::ViewHyper> hyper;
};

Instance synthetic(int c) {
    dmh::SyntheticSpec spec;
    spec.n_per_class = 500;
    spec.dims = {128, 64};
    const auto ds = dmh::generate_synthetic(spec);
    Instance inst;
    for (const auto& v : ds.views) {
        const double beta = dmh::auto_beta(v);
        inst.views.push_back({v.data * beta, v.view_id, v.is_label_view});
        inst.hyper.push_back({v.is_label_view ? 10.0 : 1.0, beta, 0.001});
    }
    inst.params = dmh::initialize_params(inst.views, inst.hyper, c, 0);
    return inst;
}

void BM_ViewGradient(benchmark::State& state) {
    const auto inst = synthetic(static_cast<int>(state.range(0)));
    const auto B = dmh::update_code_matrix(inst.views, inst.params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dmh::view_gradient(inst.views[0], inst.params[0], B));
    }
}
BENCHMARK(BM_ViewGradient)->Arg(32)->Arg(128);

void BM_TrainIterations(benchmark::State& state) {
    const auto inst = synthetic(64);
    dmh::TrainConfig config;
    config.max_iter = 10;
    config.convergence_rtol = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dmh::train(inst.views, config, inst.hyper, 64));
    }
}
BENCHMARK(BM_TrainIterations)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
