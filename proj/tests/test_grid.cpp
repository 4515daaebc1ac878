#include <doctest.h>

#include <cmath>

#include "latwave/grid.hpp"

using namespace latwave;

static Vec sample(const Grid& g, double (*f)(double))
{
    Vec v(g.nodes());
    for (long i = 0; i < g.nodes(); ++i) v[i] = f(g.xi(i));
    return v;
}

TEST_CASE("shift_sum")
{
    const Grid g{10, 20};
    const Vec c = Vec::Constant(g.nodes(), 0.7);
    CHECK((shift_sum(g, c, 1, 0.7, 0.7) - 2.0 * c).cwiseAbs().maxCoeff() == 0.0);

    const Vec x = sample(g, [](double s) { return s; });
    const Vec s2 = shift_sum(g, x, 2, 0.0, 0.0);
    for (long i = 2 * g.m; i < g.nodes() - 2 * g.m; ++i) CHECK(s2[i] == doctest::Approx(2.0 * g.xi(i)));

    Vec step = Vec::Zero(g.nodes());
    for (long i = 0; i < g.nodes(); ++i) step[i] = g.xi(i) >= 0.0 ? 1.0 : 0.0;
    const Vec s = shift_sum(g, step, 1, 0.0, 1.0);
    CHECK(s[g.nodes() - 1] == step[g.nodes() - 1 - g.m] + 1.0);
}

TEST_CASE("delta_mix")
{
    const Grid g{10, 20};
    const Vec c = Vec::Constant(g.nodes(), 0.3);
    CHECK(delta_mix(g, c, c, 0.3, 0.3).cwiseAbs().maxCoeff() == 0.0);

    const Grid gi{10, 1};
    const Vec z = Vec::Zero(gi.nodes());
    const Vec psi = sample(gi, [](double s) { return std::cos(M_PI * s); });
    const Vec d = delta_mix(gi, z, psi, 0.0, 0.0);
    for (long i = 1; i + 1 < gi.nodes(); ++i) CHECK(d[i] == doctest::Approx(-2.0 * psi[i]).scale(1.0));

    const Vec ps = sample(g, [](double s) { return std::tanh(s); });
    const Vec phi = 0.5 * shift_sum(g, ps, 1, -1.0, 1.0);
    CHECK(delta_mix(g, phi, ps, -1.0, 1.0).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("delta_mix plus 2 phi equals shift_sum, and both are linear")
{
    const Grid g{8, 10};
    const Vec a = sample(g, [](double s) { return std::sin(s); });
    const Vec b = sample(g, [](double s) { return std::exp(-s * s); });
    CHECK((delta_mix(g, a, b, 0.1, 0.2) + 2.0 * a - shift_sum(g, b, 1, 0.1, 0.2)).cwiseAbs().maxCoeff() <= 1e-15);
    const Vec lin = shift_sum(g, 2.0 * a + 3.0 * b, 1, 0.0, 0.0);
    const Vec sep = 2.0 * shift_sum(g, a, 1, 0.0, 0.0) + 3.0 * shift_sum(g, b, 1, 0.0, 0.0);
    CHECK((lin - sep).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("derivative")
{
    const Grid g{10, 20};
    const Vec lin = sample(g, [](double s) { return 3.0 * s; });
    const Vec d = derivative(g, lin);
    for (long i = 1; i + 1 < g.nodes(); ++i) CHECK(d[i] == doctest::Approx(3.0));
    CHECK(derivative(g, Vec::Constant(g.nodes(), 2.0)).cwiseAbs().maxCoeff() == 0.0);

    const Vec s = sample(g, [](double x) { return std::sin(x); });
    const Vec ds = derivative(g, s);
    double err = 0.0;
    for (long i = 1; i + 1 < g.nodes(); ++i) err = std::max(err, std::abs(ds[i] - std::cos(g.xi(i))));
    CHECK(err <= g.h() * g.h() / 6.0 * 1.01);
}

TEST_CASE("second derivative of a cubic converges at second order")
{
    auto err = [](int m) {
        const Grid g{4, m};
        const Vec c = sample(g, [](double s) { return s * s * s - s; });
        const Vec dd = derivative(g, derivative(g, c));
        double e = 0.0;
        for (long i = 2; i + 2 < g.nodes(); ++i) e = std::max(e, std::abs(dd[i] - 6.0 * g.xi(i)));
        return e;
    };
    // Central differences are exact on cubics, so the error may already sit
    // at round-off; otherwise it must fall at second order.
    const double e1 = err(10), e2 = err(20);
    CHECK(e2 <= std::max(e1 / std::pow(2.0, 1.9), 1e-10));
}

TEST_CASE("norms")
{
    const Grid g{5, 10};
    const ModelParams p = fhn_corollary_preset();
    Profile z = make_full_profile(g, p);
    const Norms n0 = norms(z);
    CHECK(n0.l2 == 0.0);
    CHECK(n0.h1 == 0.0);
    CHECK(n0.sup == 0.0);

    Profile one = z;
    one.data.setOnes();
    const double e = 0.1;
    const Norms plain = norms(one);
    const Norms m12 = norms(one, ScalingWeights{ScalingWeights::Variant::M12, e});
    // Odd blocks carry half of the squared norm; M12 scales them by eps^2.
    CHECK(m12.l2 * m12.l2 == doctest::Approx(plain.l2 * plain.l2 * (1.0 + e * e) / 2.0));

    // Hat function against an independent trapezoid sum.
    Profile hat = z;
    double ref = 0.0;
    for (long i = 0; i < g.nodes(); ++i) {
        const double v = std::max(0.0, 1.0 - std::abs(g.xi(i)));
        hat.at(i, 2) = v;
        const double w = (i == 0 || i == g.nodes() - 1) ? 0.5 * g.h() : g.h();
        ref += w * v * v;
    }
    CHECK(norms(hat).l2 == doctest::Approx(std::sqrt(ref)).epsilon(1e-14));
}

TEST_CASE("interpolate reproduces nodes")
{
    const Grid g{5, 10};
    Profile p = make_even_profile(g, nagumo_preset(0.1));
    for (long i = 0; i < g.nodes(); ++i) p.at(i, 0) = std::sin(g.xi(i));
    for (long i = 0; i < g.nodes(); ++i) CHECK(interpolate(p, 0, g.xi(i)) == p.at(i, 0));
}
