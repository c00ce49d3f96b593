#include <benchmark/benchmark.h>

#include <ivreg/baselines.hpp>
#include <ivreg/experiment.hpp>
#include <ivreg/variational.hpp>

namespace {

ivreg::Instance blur(std::size_t n) {
    ivreg::ExperimentConfig cfg;
    cfg.n = n;
    return ivreg::synthesize(cfg, 1);
}

void BM_SolvePrimal(benchmark::State& state) {
    const auto inst = blur(static_cast<std::size_t>(state.range(0)));
    const ivreg::Regularizer j(1e-4);
    for (auto _ : state) {
        auto r = ivreg::solve_primal(j, inst.op, inst.data);
        benchmark::DoNotOptimize(r.objective);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolvePrimal)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond)->Complexity();

void BM_SolveDenoising(benchmark::State& state) {
    ivreg::ExperimentConfig cfg;
    cfg.n = static_cast<std::size_t>(state.range(0));
    cfg.forward = ivreg::ForwardKind::identity;
    cfg.operator_noise = 0.0;
    const auto inst = ivreg::synthesize(cfg, 1);
    const ivreg::Regularizer j(1e-4);
    for (auto _ : state) {
        auto r = ivreg::solve_primal(j, inst.op, inst.data);
        benchmark::DoNotOptimize(r.objective);
    }
}
BENCHMARK(BM_SolveDenoising)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MinNormCertificate(benchmark::State& state) {
    const auto inst = blur(static_cast<std::size_t>(state.range(0)));
    const ivreg::Regularizer j(1e-4);
    for (auto _ : state) {
        auto c = ivreg::min_norm_certificate(j, inst.a_exact, inst.u_exact);
        benchmark::DoNotOptimize(c.norm);
    }
}
BENCHMARK(BM_MinNormCertificate)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TikhonovSweep(benchmark::State& state) {
    const auto inst = blur(64);
    const ivreg::Regularizer j(1e-4);
    for (auto _ : state) {
        ivreg::TikhonovPath path(j, inst.a_noisy, inst.f_noisy);
        for (double alpha = 1e-4; alpha < 1.0; alpha *= 4.0) benchmark::DoNotOptimize(path.solve(alpha).residual);
    }
}
BENCHMARK(BM_TikhonovSweep)->Unit(benchmark::kMillisecond);

}  // namespace
