#include <doctest.h>

#include <cmath>
#include <numeric>

#include "latwave/simulator.hpp"
#include "latwave/wave_solver.hpp"

using namespace latwave;

static ModelParams nagumo_at(double a, double eps)
{
    ModelParams p = nagumo_preset(a);
    p.eps = eps;
    return p;
}

static const FullWave& nagumo_wave()
{
    static const FullWave w = [] {
        SeedOptions so;
        so.sites = 400;
        so.sim_time = 300.0;
        const ModelParams p = nagumo_at(0.1, 0.1);
        const SingularPulse sp = build_singular_pulse(p, Grid{40, 20}, {}, so);
        return newton_solve(p, sp.full(), sp.c0, {});
    }();
    return w;
}

static LatticeState front_state(const LatticeSystem& s, long lo, long hi, Boundary bc)
{
    LatticeState st = make_state(s, lo, hi, bc);
    for (long i = 0; i < st.sites(); ++i) st.u[i] = 0.5 * (1.0 + std::tanh(0.3 * (st.j_lo + i) + 0.1 * std::sin(i)));
    return st;
}

TEST_CASE("rest state is an equilibrium")
{
    for (const ModelParams& p : {fhn_corollary_preset(), nagumo_at(0.1, 0.3)}) {
        const LatticeSystem s = LatticeSystem::lde(p);
        LatticeState st = make_state(s, -20, 19, Boundary::Periodic);
        Vec du(st.u.size()), dw(st.w.size());
        rhs(st, s, du, dw);
        CHECK(du.cwiseAbs().maxCoeff() == 0.0);
        if (dw.size()) CHECK(dw.cwiseAbs().maxCoeff() == 0.0);
        for (Scheme sc : {Scheme::IMEX_CN, Scheme::RK4}) {
            const LatticeState next = step(st, s, 1e-3, sc);
            CHECK(next.u.cwiseAbs().maxCoeff() == 0.0);
            CHECK(next.t == doctest::Approx(1e-3));
        }
    }
}

TEST_CASE("single-site bump sees the lattice stencil")
{
    const ModelParams p = nagumo_at(0.1, 0.25);
    const LatticeSystem s = LatticeSystem::lde(p);
    LatticeState st = make_state(s, -5, 5, Boundary::Clamped);
    const double b = 1e-3;
    st.u[5] = b;  // site j = 0, even
    Vec du(st.u.size()), dw(0);
    rhs(st, s, du, dw);
    const double D = p.diffusion[0];
    CHECK(du[5] == doctest::Approx(-2.0 * D * b + cubic(b, p.even.a)).epsilon(1e-13));
    CHECK(du[4] == doctest::Approx(D * b / (p.eps * p.eps)).epsilon(1e-13));
    CHECK(du[6] == doctest::Approx(D * b / (p.eps * p.eps)).epsilon(1e-13));
    CHECK(du[3] == 0.0);
}

TEST_CASE("periodic coupling conserves the weighted sum")
{
    const ModelParams p = nagumo_at(0.1, 0.4);
    const LatticeSystem s = LatticeSystem::lde(p);
    const LatticeState st = front_state(s, 0, 59, Boundary::Periodic);
    Vec du(st.u.size()), dw(0);
    rhs(st, s, du, dw);
    double sum = 0.0;
    for (long i = 0; i < st.sites(); ++i) {
        const int par = s.parity(st.j_lo + i);
        sum += (du[i] - cubic(st.u[i], s.reaction[par].a)) / s.coupling[par][0];
    }
    CHECK(std::abs(sum) <= 1e-11);
}

TEST_CASE("IMEX and RK4 agree")
{
    const ModelParams p = nagumo_at(0.1, 0.5);
    const LatticeSystem s = LatticeSystem::lde(p);
    const LatticeState init = front_state(s, -30, 30, Boundary::Clamped);
    const Trajectory a = simulate(s, init, 1e-3, 1.0, 1.0, Scheme::IMEX_CN);
    const Trajectory b = simulate(s, init, 1e-3, 1.0, 1.0, Scheme::RK4);
    CHECK(a.back().t == doctest::Approx(1.0));
    CHECK((a.back().state.u - b.back().state.u).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK_THROWS_AS(simulate(s, init, 1.0, 1.0, 1.0, Scheme::RK4), std::invalid_argument);
}

TEST_CASE("two-site translation equivariance")
{
    const ModelParams p = nagumo_at(0.1, 0.3);
    const LatticeSystem s = LatticeSystem::lde(p);
    const LatticeState st = front_state(s, 0, 39, Boundary::Periodic);
    LatticeState sh = st;
    const long S = st.sites();
    for (long i = 0; i < S; ++i) sh.u[i] = st.u[(i + 2) % S];
    const LatticeState a = step(st, s, 0.01, Scheme::IMEX_CN);
    const LatticeState b = step(sh, s, 0.01, Scheme::IMEX_CN);
    double d = 0.0;
    for (long i = 0; i < S; ++i) d = std::max(d, std::abs(b.u[i] - a.u[(i + 2) % S]));
    CHECK(d <= 1e-12);
}

TEST_CASE("sampling a wave onto the lattice")
{
    const FullWave& w = nagumo_wave();
    const double t = 0.3;
    const LatticeState st = sample_wave_to_lattice(w, t, -4, 4);
    const int uo = w.profile.block_offset("u_o"), ue = w.profile.block_offset("u_e");
    CHECK(st.u[4] == doctest::Approx(interpolate(w.profile, ue, w.c * t)).epsilon(1e-14));
    CHECK(st.u[5] == doctest::Approx(interpolate(w.profile, uo, 1.0 + w.c * t)).epsilon(1e-14));
    const LatticeState at0 = sample_wave_to_lattice(w, 0.0, 0, 0);
    CHECK(at0.u[0] == w.profile.at(w.profile.grid.zero_index(), ue));
}

TEST_CASE("travelling wave moves at its speed")
{
    const FullWave& w = nagumo_wave();
    const ModelParams p = nagumo_at(0.1, 0.1);
    const LatticeSystem s = LatticeSystem::lde(p);
    const Trajectory traj = simulate(s, sample_wave_to_lattice(w, 0.0, -120, 80), 0.01, 40.0, 0.5, Scheme::IMEX_CN);
    const SpeedFit f = measure_speed(traj, s, 0.5);
    CHECK(std::abs(f.speed - w.c) <= 1e-3);
    CHECK(f.r2 >= 0.9999);
}

TEST_CASE("balanced Nagumo front is pinned")
{
    const ModelParams p = nagumo_at(0.5, 0.1);
    const LatticeSystem s = LatticeSystem::even_limit(p);
    LatticeState st = make_state(s, -100, 100, Boundary::Clamped);
    for (long i = 0; i < st.sites(); ++i) st.u[i] = st.j_lo + i >= 0 ? 1.0 : 0.0;
    const Trajectory traj = simulate(s, st, 0.05, 100.0, 1.0, Scheme::IMEX_CN);
    CHECK(std::abs(measure_speed(traj, s, 0.5).speed) <= 1e-3);
}

TEST_CASE("stability experiment")
{
    const FullWave& w = nagumo_wave();
    const ModelParams p = nagumo_at(0.1, 0.1);
    StabilityOptions opt;
    opt.j_lo = -150;
    opt.j_hi = 100;
    opt.T = 20.0;
    SUBCASE("zero perturbation stays on the wave")
    {
        Perturbation none;
        none.amplitude = 0.0;
        const StabilityResult r = stability_experiment(w, p, none, 2.0, opt);
        REQUIRE_FALSE(r.distances.empty());
        CHECK(*std::max_element(r.distances.begin(), r.distances.end()) <= 1e-8);
        CHECK_FALSE(r.unstable);
    }
    SUBCASE("small perturbation decays")
    {
        opt.T = 60.0;
        const StabilityResult r = stability_experiment(w, p, {}, 2.0, opt);
        REQUIRE(r.fit_done);
        CHECK(r.beta > 0.0);
        CHECK(r.r2 >= 0.98);
        CHECK(std::isfinite(r.theta_tilde));
        CHECK(r.distances.back() < 0.1 * r.distances.front());
    }
}

TEST_CASE("normal samples")
{
    const std::vector<double> a = normal_samples(7, 20000), b = normal_samples(7, 20000);
    CHECK(a == b);
    CHECK(normal_samples(8, 5) != normal_samples(7, 5));
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
    double var = 0.0;
    for (double x : a) var += (x - mean) * (x - mean);
    var /= a.size();
    CHECK(std::abs(mean) <= 0.03);
    CHECK(std::abs(var - 1.0) <= 0.05);
}
