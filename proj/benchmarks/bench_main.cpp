#include <benchmark/benchmark.h>

#include <random>

#include "typeswap/metrics.hpp"
#include "typeswap/model.hpp"
#include "typeswap/synth.hpp"
#include "typeswap/typeassign.hpp"
#include "typeswap/eval.hpp"

using namespace typeswap;

namespace {

ModelConfig config_for(int which) {
    return which == 0 ? ModelConfig::desk() : ModelConfig::full();
}

Batch sprite_batch(int n) {
    std::vector<HsvImage> imgs;
    std::vector<TypeVector> tvs;
    for (const auto& r : synth::make_catalog(static_cast<std::size_t>(n), 1)) {
        imgs.push_back(prepare_for_eval(r.image, 0, r.id));
        tvs.push_back(r.type_vector());
    }
    return make_batch(imgs, tvs);
}

Matrix noise(int rows, int cols) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    return m;
}

// Arg 0: 0 = desk, 1 = full. Arg 1: batch size.
void BM_Forward(benchmark::State& state) {
    const Cvae model(config_for(static_cast<int>(state.range(0))), 1);
    const Batch batch = sprite_batch(static_cast<int>(state.range(1)));
    const Matrix eps = noise(batch.size(), model.config().latent_dim);
    for (auto _ : state) benchmark::DoNotOptimize(model.forward(batch, eps));
    state.SetItemsProcessed(state.iterations() * batch.size());
}
BENCHMARK(BM_Forward)->Args({0, 16})->Args({1, 1})->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
    const Cvae model(config_for(static_cast<int>(state.range(0))), 1);
    const Batch batch = sprite_batch(static_cast<int>(state.range(1)));
    const Matrix eps = noise(batch.size(), model.config().latent_dim);
    ParameterSet grad = model.params().zeros_like();
    for (auto _ : state) benchmark::DoNotOptimize(model.loss_and_gradient(batch, eps, grad));
    state.SetItemsProcessed(state.iterations() * batch.size());
}
BENCHMARK(BM_TrainStep)->Args({0, 16})->Args({1, 1})->Args({1, 16})->Unit(benchmark::kMillisecond);

void BM_GaleShapley(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u;
    PreferenceMatrix prefs{n, std::vector<double>(n * kNumTypes)};
    for (double& d : prefs.distances) d = u(rng);
    std::vector<double> weights(kNumTypes, 1.0);
    const TypeQuota quotas = type_quotas(weights, n);
    for (auto _ : state) benchmark::DoNotOptimize(gale_shapley_assign(prefs, quotas));
}
BENCHMARK(BM_GaleShapley)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_SsimYuv(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u;
    RgbImage a(32, 32), b(32, 32);
    for (double& v : a.pixels()) v = u(rng);
    for (double& v : b.pixels()) v = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(ssim_yuv(a, b));
}
BENCHMARK(BM_SsimYuv);

}  // namespace
BENCHMARK_MAIN();
