#include <benchmark/benchmark.h>

#include <random>

#include "tatd/optimizer.hpp"
#include "tatd/smoothing.hpp"
#include "tatd/synth.hpp"

namespace {

using namespace tatd;

SynthSpec bench_spec(double rate) {
    SynthSpec spec;
    spec.dims = {50, 20, 15};
    spec.true_rank = 3;
    spec.rate = rate;
    spec.seed = 1;
    return spec;
}

void bm_predict(benchmark::State& state) {
    const auto data = generate(bench_spec(0.3));
    const auto model =
        FactorModel::init(data.tensor.dims(), static_cast<int>(state.range(0)),
                          data.tensor.time_mode(), 7);
    std::int64_t e = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict(model, data.tensor.index(e)));
        e = (e + 1) % data.tensor.nnz();
    }
}
BENCHMARK(bm_predict)->Arg(3)->Arg(10)->Arg(40);

void bm_rowwise_update(benchmark::State& state) {
    const auto data = generate(bench_spec(0.3));
    auto model =
        FactorModel::init(data.tensor.dims(), static_cast<int>(state.range(0)),
                          data.tensor.time_mode(), 7);
    const ModeSlices slices(data.tensor, 2);
    for (auto _ : state)
        rowwise_update(model, data.tensor, 2, 1e-2, &slices);
    state.SetItemsProcessed(state.iterations() * data.tensor.nnz());
}
BENCHMARK(bm_rowwise_update)->Arg(3)->Arg(10)->Arg(40);

void bm_time_gradient(benchmark::State& state) {
    const auto data = generate(bench_spec(0.3));
    const auto model = FactorModel::init(data.tensor.dims(), 10,
                                         data.tensor.time_mode(), 7);
    const auto spec = SmoothingSpec::build(data.tensor.time_size(), 3, 0.5,
                                           slice_census(data.tensor));
    const ModeSlices slices(data.tensor, data.tensor.time_mode());
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto g = time_gradient(model, data.tensor, spec, 10.0, &slices, threads);
        benchmark::DoNotOptimize(g.data());
    }
    state.SetItemsProcessed(state.iterations() * data.tensor.nnz());
}
BENCHMARK(bm_time_gradient)->Arg(1)->Arg(2)->Arg(4);

void bm_adam_epoch(benchmark::State& state) {
    Eigen::MatrixXd factor(50, 10);
    Eigen::MatrixXd gradient(50, 10);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (Eigen::Index r = 0; r < factor.rows(); ++r)
        for (Eigen::Index c = 0; c < factor.cols(); ++c) {
            factor(r, c) = n(rng);
            gradient(r, c) = n(rng);
        }
    AdamState adam(50, 10);
    for (auto _ : state) adam_step(factor, gradient, adam, 1e-4);
}
BENCHMARK(bm_adam_epoch);

void bm_smoothing_build(benchmark::State& state) {
    const auto data = generate(bench_spec(0.3));
    const auto census = slice_census(data.tensor);
    for (auto _ : state) {
        auto spec = SmoothingSpec::build(data.tensor.time_size(),
                                         static_cast<int>(state.range(0)), 0.5,
                                         census);
        benchmark::DoNotOptimize(&spec);
    }
}
BENCHMARK(bm_smoothing_build)->Arg(3)->Arg(5)->Arg(9);

void bm_fit_outer_iteration(benchmark::State& state) {
    const auto data = generate(bench_spec(static_cast<double>(state.range(0)) /
                                          10.0));
    const auto normalized = z_normalize(data.tensor);
    const auto splits = split(normalized.tensor, 1);
    TrainConfig cfg;
    cfg.rank = 10;
    cfg.max_inner = 5;
    for (auto _ : state) {
        state.PauseTiming();
        cfg.max_outer = 1;
        state.ResumeTiming();
        auto result = fit(splits.train, splits.validation, cfg);
        benchmark::DoNotOptimize(result.report.best_val_rmse);
    }
}
BENCHMARK(bm_fit_outer_iteration)->Arg(1)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
