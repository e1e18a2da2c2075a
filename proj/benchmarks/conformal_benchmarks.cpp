#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "conformal/classification.hpp"
#include "conformal/learners.hpp"
#include "conformal/quantile.hpp"
#include "conformal/regression.hpp"
#include "conformal/rng.hpp"
#include "conformal/synth.hpp"
#include "conformal/timeseries.hpp"

using namespace conformal;

namespace {

std::vector<std::size_t> range(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> out(end - begin);
    std::iota(out.begin(), out.end(), begin);
    return out;
}

void BM_ConformalQuantile(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    std::vector<double> values(n);
    for (auto& v : values) v = std::abs(rng.normal());
    const ConformityScores scores(values, ScoreKind::absolute_residual);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conformal_quantile(scores, RiskLevel(0.1)));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConformalQuantile)->RangeMultiplier(10)->Range(100, 1000000)->Complexity();

void BM_FitCross(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto train = generate({LinearGaussian{n, 5, 1.0}, 2});
    for (auto _ : state) {
        auto fitted = fit_cross(OlsRegressor(), train, ResamplingScheme::kfold(10, 3), IntervalMethod::plus);
        benchmark::DoNotOptimize(fitted);
    }
}
BENCHMARK(BM_FitCross)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_CrossPlusPredict(benchmark::State& state) {
    const auto all = generate({LinearGaussian{1000 + 256, 5, 1.0}, 4});
    const auto fitted = fit_cross(OlsRegressor(), all.subset(range(0, 1000)),
                                  ResamplingScheme::kfold(10, 5), IntervalMethod::plus);
    const auto test = all.subset(range(1000, all.size()));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fitted.predict_batch(test.features(), RiskLevel(0.1), 1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(test.size()));
}
BENCHMARK(BM_CrossPlusPredict)->Unit(benchmark::kMillisecond);

void BM_EnbpiPredictUpdate(benchmark::State& state) {
    const auto series = generate({Ar1Changepoint{2000, 0.5, 1.0, 0.0, 1000}, 6});
    const auto lagged = build_lag_features(series.targets(), 5);
    EnbpiConfig config;
    config.n_bootstraps = 30;
    config.block_length = 24;
    config.seed = 7;
    const auto fitted = fit_enbpi(OlsRegressor(), lagged.subset(range(0, 1000)), config);
    const auto test = lagged.subset(range(1000, lagged.size()));
    for (auto _ : state) {
        FittedEnbpi online = fitted;
        for (std::size_t t = 0; t < 100; ++t) {
            benchmark::DoNotOptimize(online.predict(test.row(t), RiskLevel(0.1)));
            const std::size_t row[] = {t};
            online.update_scores(test.features().select_rows(row), test.targets().subspan(t, 1));
        }
    }
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_EnbpiPredictUpdate)->Unit(benchmark::kMillisecond);

void BM_ApsSets(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    Rng rng(8);
    std::vector<std::vector<double>> rows(1000, std::vector<double>(k));
    for (auto& p : rows) {
        double sum = 0.0;
        for (auto& v : p) sum += (v = rng.uniform());
        for (auto& v : p) v /= sum;
    }
    for (auto _ : state) {
        for (const auto& p : rows) benchmark::DoNotOptimize(aps_set(p, 0.9));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ApsSets)->Arg(3)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
