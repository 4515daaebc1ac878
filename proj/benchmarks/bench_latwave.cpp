#include <benchmark/benchmark.h>

#include <cmath>

#include "latwave/banded.hpp"
#include "latwave/linearization.hpp"
#include "latwave/simulator.hpp"
#include "latwave/wave_solver.hpp"

using namespace latwave;

// Smooth pulse-like profile; the operators only need a plausible state.
static Profile synthetic_pulse(int L, int m)
{
    const ModelParams p = fhn_corollary_preset();
    Profile U = make_full_profile(Grid{L, m}, p);
    for (long i = 0; i < U.nodes(); ++i) {
        const double x = U.grid.xi(i);
        const double u = std::exp(-x * x / 200.0);
        U.at(i, 0) = u;
        U.at(i, 1) = 0.2 * u;
        U.at(i, 2) = u;
        U.at(i, 3) = 0.2 * u;
    }
    return U;
}

static void BM_ResidualFull(benchmark::State& state)
{
    ModelParams p = fhn_corollary_preset();
    p.eps = 0.05;
    const Profile U = synthetic_pulse(static_cast<int>(state.range(0)), 20);
    for (auto _ : state) {
        Profile r = residual_full(U, 0.58, p);
        benchmark::DoNotOptimize(r.data.data());
    }
}
BENCHMARK(BM_ResidualFull)->Arg(40)->Arg(170)->Unit(benchmark::kMicrosecond);

static void BM_AssembleLeps(benchmark::State& state)
{
    const ModelParams p = fhn_corollary_preset();
    const Profile U = synthetic_pulse(static_cast<int>(state.range(0)), 20);
    for (auto _ : state) {
        OperatorMatrix L = assemble_Leps(U, 0.58, 0.05, 0.0, p);
        benchmark::DoNotOptimize(L.A.nonZeros());
    }
}
BENCHMARK(BM_AssembleLeps)->Arg(40)->Arg(170)->Unit(benchmark::kMillisecond);

static void BM_BandLUFactor(benchmark::State& state)
{
    const ModelParams p = fhn_corollary_preset();
    const Profile U = synthetic_pulse(static_cast<int>(state.range(0)), 20);
    const SpMat<double> A = assemble_Leps(U, 0.58, 0.05, 0.0, p).real_matrix();
    for (auto _ : state) {
        BandLU<double> lu;
        lu.factor(A, 0.1);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_BandLUFactor)->Arg(40)->Arg(170)->Unit(benchmark::kMillisecond);

static void BM_BandLUSolveComplex(benchmark::State& state)
{
    const ModelParams p = fhn_corollary_preset();
    const Profile U = synthetic_pulse(static_cast<int>(state.range(0)), 20);
    const SpMat<cplx> A = assemble_Leps(U, 0.58, 0.05, 0.0, p).complex_matrix();
    BandLU<cplx> lu;
    lu.factor(A, cplx(0.1, 1.0));
    VecT<cplx> b = VecT<cplx>::Ones(A.rows());
    for (auto _ : state) {
        VecT<cplx> x = b;
        lu.solve(x);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_BandLUSolveComplex)->Arg(40)->Arg(170)->Unit(benchmark::kMicrosecond);

static void BM_LatticeStep(benchmark::State& state)
{
    ModelParams p = fhn_corollary_preset();
    p.eps = 0.05;
    const LatticeSystem s = LatticeSystem::lde(p);
    LatticeState st = make_state(s, -300, 300, Boundary::Clamped);
    for (long i = 0; i < st.sites(); ++i) st.u[i] = std::exp(-0.01 * static_cast<double>((i - 300) * (i - 300)));
    const Scheme scheme = state.range(0) == 0 ? Scheme::IMEX_CN : Scheme::RK4;
    const double dt = scheme == Scheme::RK4 ? 0.5 * rk4_dt_bound(s) : 0.01;
    Integrator integ(s, st, dt, scheme);
    for (auto _ : state) {
        integ.step(st);
        benchmark::DoNotOptimize(st.u.data());
    }
    state.SetLabel(scheme == Scheme::RK4 ? "rk4" : "imex-cn");
}
BENCHMARK(BM_LatticeStep)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
