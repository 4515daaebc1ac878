#include <doctest.h>

#include <random>

#include "latwave/model.hpp"

using namespace latwave;

static Vec v1(double a) { return Vec::Constant(1, a); }
static Vec v2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

TEST_CASE("eval_reaction at rest states and a hand-evaluated point")
{
    CHECK(eval_reaction(Reaction::nagumo(0.1), v1(0.0))[0] == 0.0);
    const Vec f = eval_reaction(Reaction::fhn(0.1, 0.01, 1.0), v2(0.0, 0.0));
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 0.0);
    CHECK(eval_reaction(Reaction::nagumo(0.1), v1(0.5))[0] == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("jac_reaction closed forms")
{
    const Mat J = jac_reaction(Reaction::fhn(0.1, 0.01, 1.0), v2(0.0, 0.0));
    CHECK(J(0, 0) == doctest::Approx(-0.1));
    CHECK(J(0, 1) == -1.0);
    CHECK(J(1, 0) == doctest::Approx(0.01));
    CHECK(J(1, 1) == doctest::Approx(-0.01));
    CHECK(jac_reaction(Reaction::nagumo(0.5), v1(0.5))(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("jac_reaction matches central differences at random points")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    const Reaction rs[] = {Reaction::nagumo(0.1), Reaction::nagumo(0.5), Reaction::fhn(0.1, 0.01, 1.0),
                           Reaction::fhn(0.3, 0.05, 2.0)};
    for (const Reaction& r : rs)
        for (int t = 0; t < 100; ++t) {
            Vec x(r.dim());
            for (int i = 0; i < r.dim(); ++i) x[i] = U(rng);
            const Mat J = jac_reaction(r, x);
            for (int j = 0; j < r.dim(); ++j) {
                const double h = 1e-6;
                Vec xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                const Vec col = (eval_reaction(r, xp) - eval_reaction(r, xm)) / (2 * h);
                for (int i = 0; i < r.dim(); ++i)
                    CHECK(std::abs(col[i] - J(i, j)) <= 1e-6 * std::max(1.0, std::abs(J(i, j))));
            }
        }
}

TEST_CASE("Nagumo cubic is odd about u = 1/2 when a = 1/2")
{
    for (int i = 0; i <= 100; ++i) {
        const double u = -1.0 + 3.0 * i / 100.0;
        CHECK(cubic(1.0 - u, 0.5) == doctest::Approx(-cubic(u, 0.5)).epsilon(1e-14).scale(1.0));
    }
}

TEST_CASE("h_alpha")
{
    CHECK(check_h_alpha(Reaction::nagumo(0.1), v1(0.0), v1(1.0)));
    CHECK_FALSE(check_h_alpha(Reaction::fhn(0.1, 0.01, 1.0), v2(0.0, 0.0), v2(0.0, 0.0)));
    CHECK(check_h_alpha(Reaction::nagumo(0.999), v1(0.0), v1(1.0)));
}

TEST_CASE("h_beta")
{
    const HBetaResult a = check_h_beta(Reaction::fhn(0.1, 0.01, 1.0), v2(0, 0), v2(0, 0));
    CHECK(a.applicable);
    CHECK(a.holds);
    REQUIRE(a.Gamma);
    CHECK(*a.Gamma == doctest::Approx(100.0));
    CHECK(*a.Gamma * 0.01 == 1.0);
    const HBetaResult b = check_h_beta(Reaction::fhn(0.1, 1.0, 1.0), v2(0, 0), v2(0, 0));
    CHECK(b.holds);
    CHECK(*b.Gamma == 1.0);
    const HBetaResult c = check_h_beta(Reaction::fhn(0.1, 0.05, 1.0), v2(0, 0), v2(0, 0));
    CHECK(*c.Gamma * 0.05 == 1.0);
    CHECK_FALSE(check_h_beta(Reaction::nagumo(0.1), v1(0), v1(1)).applicable);
}

TEST_CASE("check_assumptions on the presets")
{
    const AssumptionReport r = check_assumptions(fhn_corollary_preset());
    CHECK(r.hn1);
    CHECK(r.hn2);
    CHECK(r.gamma_window_applicable);
    CHECK(r.gamma_window);
    CHECK(r.gamma_window_bound == doctest::Approx(4.0 / 0.81));

    const AssumptionReport n = check_assumptions(nagumo_preset(0.1));
    CHECK(n.hn1);
    CHECK(n.odd.h_alpha);
    CHECK(n.even.h_alpha);
}

TEST_CASE("zero diffusion fails HN1")
{
    ModelParams p = fhn_corollary_preset();
    p.diffusion[0] = 0.0;
    CHECK_FALSE(check_assumptions(p).hn1);
}

TEST_CASE("mixed model evaluates HN2 per triplet")
{
    ModelParams p = fhn_corollary_preset();
    p.odd = Reaction::nagumo(0.1);
    p.rest_minus_odd = v1(0.0);
    p.rest_plus_odd = v1(0.0);
    const AssumptionReport r = check_assumptions(p);
    CHECK(r.odd.h_alpha);
    CHECK_FALSE(r.odd.h_beta.applicable);
    CHECK(r.even.h_beta.holds);
    CHECK(r.hn2 == (r.odd.hn2 && r.even.hn2));
}

TEST_CASE("gamma outside the window is a warning, not a failure")
{
    ModelParams p = fhn_corollary_preset();
    p.even.gamma = 6.0;
    const AssumptionReport r = check_assumptions(p);
    CHECK(r.hn1);
    CHECK_FALSE(r.gamma_window);
    CHECK_FALSE(r.warnings.empty());
}
