// bench_core.cpp - microbenchmarks for the inner loops: HEOM step, LVN step, concurrence

#include <numbers>

#include <benchmark/benchmark.h>

#include "qcorr/heom.hpp"

using namespace qcorr;

namespace {

const PairConfig& anomalous() {
    static const PairConfig cfg = PairConfig::with_delta(-std::numbers::pi / 2);
    return cfg;
}

} // namespace

// ---- HEOM ----

// args: depth, Matsubara terms per bath
static void BM_HeomStep(benchmark::State& st) {
    const auto& cfg = anomalous();
    const int depth = static_cast<int>(st.range(0));
    const int k = static_cast<int>(st.range(1));
    auto s = build_hierarchy(cfg, BathSpec{0.01, 1.0, cfg.T_A, k}, BathSpec{0.01, 1.0, cfg.T_B, k}, depth,
                             correlated_state(cfg, optimal_chi(cfg)));
    HeomStepper stepper;
    const double dt = s.model->max_step();
    for (auto _ : st) {
        stepper.step(s, dt);
        benchmark::DoNotOptimize(s.ados[0].data());
    }
    st.counters["ados"] = static_cast<double>(s.ados.size());
}
BENCHMARK(BM_HeomStep)->Args({2, 1})->Args({3, 1})->Args({3, 2})->Args({4, 2})->Args({5, 1})->Unit(benchmark::kMicrosecond);

// ---- closed dynamics ----

static void BM_LvnPeriod(benchmark::State& st) {
    const auto& cfg = anomalous();
    const auto rho0 = correlated_state(cfg, optimal_chi(cfg));
    for (auto _ : st) {
        auto run = integrate_lvn(cfg, rho0, 0.01, 10.0, 1000);
        benchmark::DoNotOptimize(run.states.back().matrix().data());
    }
    st.SetItemsProcessed(st.iterations() * 1000);
}
BENCHMARK(BM_LvnPeriod)->Unit(benchmark::kMicrosecond);

static void BM_ExactClosedState(benchmark::State& st) {
    const auto& cfg = anomalous();
    double t = 0.0;
    for (auto _ : st) {
        auto rho = exact_closed_state(cfg, t);
        benchmark::DoNotOptimize(rho.matrix().data());
        t += 0.01;
    }
}
BENCHMARK(BM_ExactClosedState);

// ---- state functionals ----

static void BM_Concurrence(benchmark::State& st) {
    const auto& cfg = anomalous();
    const auto rho = exact_closed_state(cfg, 3.0);
    for (auto _ : st) benchmark::DoNotOptimize(concurrence(rho));
}
BENCHMARK(BM_Concurrence);

static void BM_MutualInformation(benchmark::State& st) {
    const auto& cfg = anomalous();
    const auto rho = exact_closed_state(cfg, 3.0);
    for (auto _ : st) benchmark::DoNotOptimize(mutual_information(rho));
}
BENCHMARK(BM_MutualInformation);

BENCHMARK_MAIN();
