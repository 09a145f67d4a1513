#include <random>

#include <Eigen/QR>
#include <benchmark/benchmark.h>

#include "tnqe/encoders.hpp"
#include "tnqe/optim.hpp"
#include "tnqe/synthesis.hpp"

using namespace tnqe;

namespace {

Image noise(std::size_t size, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> px(size * size);
    for (double& v : px) v = u(rng);
    return Image(size, std::move(px));
}

CMatrix haar(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CMatrix z(n, n);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = {g(rng), g(rng)};
    Eigen::HouseholderQR<CMatrix> qr(z);
    return qr.householderQ();
}

} // namespace

static void BM_TtSvd(benchmark::State& state) {
    const QuantizedTensor t = quantize_image(noise(static_cast<std::size_t>(state.range(0)), 1));
    for (auto _ : state) benchmark::DoNotOptimize(tt_svd(t, 8));
}
BENCHMARK(BM_TtSvd)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
    const Image img = noise(static_cast<std::size_t>(state.range(0)), 2);
    const Circuit c = encode_amplitude(img).circuit;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(c));
    state.counters["gates"] = static_cast<double>(c.size());
}
BENCHMARK(BM_Simulate)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_DecomposeUnitary(benchmark::State& state) {
    const CMatrix u = haar(std::size_t{1} << state.range(0), 3);
    for (auto _ : state) benchmark::DoNotOptimize(decompose_unitary(u));
}
BENCHMARK(BM_DecomposeUnitary)->DenseRange(2, 6)->Unit(benchmark::kMillisecond);

static void BM_UnitaryGradient(benchmark::State& state) {
    const Image img = noise(static_cast<std::size_t>(state.range(0)), 4);
    const UnitaryKlObjective obj(img, 3, 4);
    std::vector<double> p(obj.parameter_count(), 0.05);
    for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(p));
}
BENCHMARK(BM_UnitaryGradient)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
