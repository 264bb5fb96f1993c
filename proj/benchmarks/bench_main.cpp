#include <benchmark/benchmark.h>

#include "polyak/counterexamples.hpp"
#include "polyak/diagnostics.hpp"
#include "polyak/problems.hpp"
#include "polyak/steppers.hpp"
#include "polyak/surrogates.hpp"

using namespace polyak;

namespace {

void BM_PolyakRunQuad(benchmark::State& state) {
    const auto prob = problems::make_problem("quad?dim=" + std::to_string(state.range(0)));
    const auto cfg = steppers::parse_stepper("polyak");
    Vec x1(static_cast<std::size_t>(state.range(0)), 3.0);
    for (auto _ : state) {
        auto traj = steppers::run(cfg, prob, "", x1, 1000, 0);
        benchmark::DoNotOptimize(traj.records.back().x[0]);
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_PolyakRunQuad)->Arg(2)->Arg(50);

void BM_Alg1StochasticRun(benchmark::State& state) {
    const auto prob = problems::make_problem("sps_fail");
    const auto cfg = steppers::parse_stepper("alg1:0.1");
    for (auto _ : state) {
        auto traj = steppers::run(cfg, prob, "shift_opt", Vec{1.0}, 1000, 7);
        benchmark::DoNotOptimize(traj.records.back().x[0]);
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Alg1StochasticRun);

void BM_LsucCertificateFig1(benchmark::State& state) {
    const auto fig1 = std::get<problems::FunctionOracle>(problems::make_problem("fig1"));
    const auto grid = diagnostics::standard_grid(fig1);
    for (auto _ : state) {
        auto cert = diagnostics::check_lsuc_const(fig1, 2.0, grid);
        benchmark::DoNotOptimize(cert.worst_margin);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.sites.size()));
}
BENCHMARK(BM_LsucCertificateFig1);

void BM_ExactChain(benchmark::State& state) {
    const auto prob = std::get<problems::StochasticProblem>(problems::make_problem("sps_fail"));
    for (auto _ : state) {
        auto chain = counterexamples::exact_sps_chain(prob, 1.0, state.range(0));
        benchmark::DoNotOptimize(chain.gap.back());
    }
}
BENCHMARK(BM_ExactChain)->Arg(100)->Arg(1000);

void BM_MapTIteration(benchmark::State& state) {
    const auto h = std::get<problems::FunctionOracle>(problems::make_problem("cycle_quad"));
    Vec x{2.0765};
    for (auto _ : state) {
        x = steppers::map_t_step(h, x);
        benchmark::DoNotOptimize(x[0]);
        if (!std::isfinite(x[0]) || std::abs(x[0]) > 1e6) x[0] = 2.0765;
    }
}
BENCHMARK(BM_MapTIteration);

}  // namespace

BENCHMARK_MAIN();
