#include <benchmark/benchmark.h>

#include "bosefit/fit.hpp"
#include "bosefit/kinetics.hpp"
#include "bosefit/model.hpp"
#include "bosefit/special_fn.hpp"
#include "bosefit/synth.hpp"

using namespace bosefit;

namespace {

void BM_Gamma(benchmark::State& state) {
    double x = 2.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gamma(x));
        x = x < 100.0 ? x + 0.5 : 2.5;
    }
}
BENCHMARK(BM_Gamma);

void BM_Zeta(benchmark::State& state) {
    double s = 2.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(zeta(s));
        s = s < 10.0 ? s + 0.25 : 2.5;
    }
}
BENCHMARK(BM_Zeta);

void BM_BoseIntegralQuadrature(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(bose_integral_quadrature(1.5));
    }
}
BENCHMARK(BM_BoseIntegralQuadrature);

void BM_BinMass(benchmark::State& state) {
    const ModelParams p{1.0, 1.5, 0.035};
    const Accuracy acc{1e-14, 1e-12, 500};
    for (auto _ : state) {
        benchmark::DoNotOptimize(bin_mass(ModelKind::BoseEinstein, p, 40.0, 42.5, acc));
    }
}
BENCHMARK(BM_BinMass);

void BM_FitSynthetic(benchmark::State& state) {
    SynthSpec spec;
    spec.params = {1.0, 1.5, 0.035};
    spec.edges = uniform_edges(2.5, static_cast<std::size_t>(state.range(0)));
    const NormalizedData d = normalize(sample_histogram(spec, 1000000, 1));
    FitOptions opts;
    opts.residual_mode = state.range(1) != 0 ? Representative::mass_integrated : Representative::midpoint;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit(d.points, opts));
    }
}
BENCHMARK(BM_FitSynthetic)->Args({40, 1})->Args({40, 0})->Args({80, 1})->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
    const kinetics::Scenario sc = kinetics::default_scenario();
    kinetics::SimulationOptions opts;
    opts.horizon = static_cast<double>(state.range(0));
    opts.burn_in = 0.0;
    std::uint64_t events = 0;
    for (auto _ : state) {
        opts.seed++;
        events += kinetics::simulate(sc.society, sc.pairs, opts).events;
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulate)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
