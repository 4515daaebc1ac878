#include <doctest.h>

#include <cmath>

#include "latwave/singular_limit.hpp"

using namespace latwave;

static SeedOptions nagumo_seed()
{
    SeedOptions s;
    s.sites = 400;
    s.sim_time = 300.0;
    return s;
}

TEST_CASE("rest states annihilate the even-limit residual")
{
    const ModelParams p = fhn_corollary_preset();
    Profile e = make_even_profile(Grid{10, 10}, p);
    CHECK(residual_even_limit(e, 0.37, p).data.cwiseAbs().maxCoeff() == 0.0);

    const ModelParams q = nagumo_preset(0.1);
    Profile plus = make_even_profile(Grid{10, 10}, q);
    plus.clamp_minus = q.rest_plus_even;
    plus.data.setOnes();
    CHECK(residual_even_limit(plus, -1.2, q).data.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Nagumo a = 0.1 front: positive speed matching the lattice simulation")
{
    const ModelParams p = nagumo_preset(0.1);
    const Grid g{40, 20};
    const EvenLimitSolution s = solve_even_limit(p, g, nullptr, 0.0, {}, nagumo_seed());
    CHECK(s.c0 > 0.0);
    CHECK(s.residual < 1e-8);
    CHECK(std::abs(s.c0 - s.seed_speed) <= 1e-2 * s.c0);

    SUBCASE("re-solving from its own output is a fixed point")
    {
        const EvenLimitSolution r = solve_even_limit(p, g, &s.profile, s.c0, {}, nagumo_seed());
        CHECK(std::abs(r.c0 - s.c0) < 1e-12);
        CHECK((r.profile.data - s.profile.data).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("shifting the seed by one node shifts the solution")
    {
        Profile shifted = s.profile;
        const int nc = s.profile.ncomp;
        for (long i = 0; i + 1 < g.nodes(); ++i)
            for (int c = 0; c < nc; ++c) shifted.at(i, c) = s.profile.at(i + 1, c);
        const EvenLimitSolution r = solve_even_limit(p, g, &shifted, s.c0, {}, nagumo_seed());
        CHECK(std::abs(r.c0 - s.c0) < 1e-10);
        double d = 0.0;
        for (long i = 40; i + 41 < g.nodes(); ++i) d = std::max(d, std::abs(r.profile.at(i, 0) - s.profile.at(i + 1, 0)));
        CHECK(d < 1e-8);
    }
}

TEST_CASE("balanced Nagumo front is standing")
{
    const ModelParams p = nagumo_preset(0.5);
    const Grid g{40, 20};
    const EvenLimitSolution s = solve_even_limit(p, g, nullptr, 0.0, {}, nagumo_seed());
    CHECK(std::abs(s.c0) <= 1e-8);
    CHECK(std::abs(s.seed_speed) <= 1e-3);

    SUBCASE("each coupled coset is a monotone front")
    {
        const long N = g.nodes();
        double drop = 0.0, lo = 1.0, hi = 0.0;
        for (long i = 0; i < N; ++i) {
            lo = std::min(lo, s.profile.at(i, 0));
            hi = std::max(hi, s.profile.at(i, 0));
            const long k = i - 2L * g.m;
            if (k >= 0) drop = std::max(drop, s.profile.at(k, 0) - s.profile.at(i, 0));
        }
        CHECK(lo >= -1e-8);
        CHECK(hi <= 1.0 + 1e-8);
        CHECK(drop <= 1e-8);
    }
    SUBCASE("no simple adjoint kernel at c = 0")
    {
        // With c = 0 the even-limit operator splits into 2m decoupled
        // cosets, each carrying a weakly pinned front.
        CHECK_THROWS_WITH_AS(compute_adjoint_kernel(s.profile, s.c0, p), doctest::Contains("adjoint kernel"),
                             std::runtime_error);
    }
}

TEST_CASE("odd recovery block")
{
    const ModelParams p = fhn_corollary_preset();
    const Grid g{20, 10};
    const Profile zero = make_even_profile(g, p);
    double res = 1.0;
    const Profile w = solve_odd_w(zero, 0.5, p, &res);
    CHECK(w.data.cwiseAbs().maxCoeff() == 0.0);
    CHECK(res <= 1e-10);
    CHECK_THROWS_WITH_AS(solve_odd_w(zero, 0.0, p), doctest::Contains("degenerate"), std::runtime_error);
}

TEST_CASE("FHN singular pulse")
{
    const ModelParams p = fhn_corollary_preset();
    const Grid g{170, 20};
    SeedOptions so;
    so.front_xi = -20.0;
    const SingularPulse sp = build_singular_pulse(p, g, {}, so);
    CHECK(sp.c0 > 0.0);
    CHECK(sp.residual_even <= 1e-8);
    CHECK(sp.residual_odd_w <= 1e-10);
    CHECK(std::abs(sp.pairing - 1.0) <= 1e-10);
    CHECK(sp.adjoint_residual <= 1e-6);
    CHECK(std::abs(sp.c0 - sp.seed_speed) <= 1e-2 * sp.c0);
    // Both tails at the rest state (0, 0).
    const long N = g.nodes();
    for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(sp.even.at(0, c)) <= 1e-6);
        CHECK(std::abs(sp.even.at(N - 1, c)) <= 1e-6);
    }
    CHECK(std::abs(sp.odd_w.at(0, 0)) <= 1e-6);
    CHECK(std::abs(sp.odd_w.at(N - 1, 0)) <= 1e-6);
    // u_o is slaved to the even profile.
    const Profile full = sp.full();
    const Vec ue = sp.even.component(0);
    const Vec uo = 0.5 * shift_sum(g, ue, 1, 0.0, 0.0);
    CHECK((full.component(0) - uo).cwiseAbs().maxCoeff() == 0.0);
}
