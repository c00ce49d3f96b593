#include <benchmark/benchmark.h>

#include <ivreg/debias.hpp>
#include <ivreg/experiment.hpp>

namespace {

struct Setup {
    ivreg::Instance inst;
    ivreg::PrimalSolveReport report;
    ivreg::ModelManifoldSpec manifold;
};

Setup prepare(std::size_t n) {
    ivreg::ExperimentConfig cfg;
    cfg.n = n;
    auto inst = ivreg::synthesize(cfg, 1);
    const ivreg::Regularizer j(cfg.gamma);
    auto report = ivreg::solve_primal(j, inst.op, inst.data);
    auto m = ivreg::manifold_from_solve(report, j, inst.op, inst.data, cfg.eps, cfg.c_cap);
    return {std::move(inst), std::move(report), std::move(m)};
}

void BM_Debias(benchmark::State& state) {
    const auto s = prepare(static_cast<std::size_t>(state.range(0)));
    ivreg::DebiasOptions o;
    o.variant = static_cast<ivreg::FrankWolfeVariant>(state.range(1));
    for (auto _ : state) {
        auto r = ivreg::debias(s.manifold, o);
        benchmark::DoNotOptimize(r.objective);
        state.counters["iterations"] = static_cast<double>(r.iterations);
    }
}
BENCHMARK(BM_Debias)
    ->ArgsProduct({{64, 128}, {0, 1}})
    ->ArgNames({"n", "variant"})
    ->Unit(benchmark::kMillisecond);

void BM_JumpsAndBars(benchmark::State& state) {
    const auto s = prepare(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const auto jumps = ivreg::detect_jumps(s.report.u, s.report.certificate.p, s.manifold.gamma);
        const auto regions = ivreg::regions_from_jumps(jumps.jumps, s.report.u.size());
        auto bars = ivreg::error_bars(s.manifold, regions);
        benchmark::DoNotOptimize(bars.bars.data());
    }
}
BENCHMARK(BM_JumpsAndBars)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
