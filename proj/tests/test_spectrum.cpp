#include <doctest.h>

#include <cmath>
#include <numbers>

#include "latwave/eigensolver.hpp"
#include "latwave/spectrum.hpp"
#include "latwave/wave_solver.hpp"

using namespace latwave;

static const SingularPulse& nagumo_pulse()
{
    static const SingularPulse sp = [] {
        SeedOptions so;
        so.sites = 400;
        so.sim_time = 300.0;
        return build_singular_pulse(nagumo_preset(0.1), Grid{40, 20}, {}, so);
    }();
    return sp;
}

static const FullWave& nagumo_wave()
{
    static const FullWave w = [] {
        ModelParams p = nagumo_preset(0.1);
        p.eps = 0.1;
        return newton_solve(p, nagumo_pulse().full(), nagumo_pulse().c0, {});
    }();
    return w;
}

static SpMat<double> diagonal(int n, double scale)
{
    SpMat<double> A(n, n);
    for (int i = 0; i < n; ++i) A.insert(i, i) = scale * (i + 1);
    A.makeCompressed();
    return A;
}

TEST_CASE("shift-invert eigensolver on diagonal matrices")
{
    for (int n : {3, 2000}) {
        const EigsReport r = eigs_near(diagonal(n, 1.0), 1.9, 2);
        REQUIRE(r.pairs.size() == 2);
        CHECK(std::abs(r.pairs[0].value - cplx(2.0)) <= 1e-10);
        CHECK(std::abs(r.pairs[1].value - cplx(1.0)) <= 1e-10);
        CHECK(r.pairs[0].residual <= 1e-9);
        CHECK(r.pairs[0].vector.norm() == doctest::Approx(1.0));
    }
}

TEST_CASE("eigensolver is deterministic")
{
    const EigsReport a = eigs_near(diagonal(1500, 0.01), cplx(0.5, 0.1), 6);
    const EigsReport b = eigs_near(diagonal(1500, 0.01), cplx(0.5, 0.1), 6);
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (size_t i = 0; i < a.pairs.size(); ++i) CHECK(a.pairs[i].value == b.pairs[i].value);
}

TEST_CASE("kernel of the Nagumo front")
{
    const FullWave& w = nagumo_wave();
    ModelParams p = nagumo_preset(0.1);
    p.eps = 0.1;
    const OperatorMatrix L = assemble_Leps(w.profile, w.c, p.eps, 0.0, p);
    const Vec dU = upwind_derivative(w.profile, upwind_left(w.c)).data;
    const KernelCandidate k = kernel_check(L, dU);
    CHECK(std::abs(k.value) <= 1e-4);
    CHECK(k.cosine >= 0.99);
    CHECK(std::abs(k.second) >= 1e-2);
}

TEST_CASE("strip scan")
{
    const FullWave& w = nagumo_wave();
    ModelParams p = nagumo_preset(0.1);
    p.eps = 0.1;
    const Vec dU = upwind_derivative(w.profile, upwind_left(w.c)).data;

    SUBCASE("stable front passes")
    {
        const OperatorMatrix L = assemble_Leps(w.profile, w.c, p.eps, 0.0, p);
        const SpectrumReport r = strip_scan(L, p, dU, {});
        CHECK(r.pass);
        CHECK(r.uncertified == 0);
        CHECK(r.re_min == -0.05);
        CHECK(r.im_max == doctest::Approx(1.5 * std::numbers::pi * std::abs(w.c)));
        CHECK(r.abscissa >= 0.0);
        int kernel = 0;
        for (const auto& e : r.eigenvalues) {
            CHECK(e.residual <= 1e-8);
            if (e.image == 0 && std::abs(e.value) <= 1e-4) ++kernel;
        }
        CHECK(kernel == 1);
        const nlohmann::json j = r.to_json();
        CHECK(j.at("verdict") == "pass");
        CHECK(j["eigenvalues"].size() == r.eigenvalues.size());
    }
    SUBCASE("an unstable eigenvalue fails the scan")
    {
        // Adding 0.2 I moves the translation eigenvalue to -0.2, outside the
        // kernel disk but inside R.
        OperatorMatrix L = assemble_Leps(w.profile, w.c, p.eps, 0.0, p);
        SpMat<double> I(L.size(), L.size());
        I.setIdentity();
        L.A = L.A - 0.02 * I;
        const SpectrumReport r = strip_scan(L, p, dU, {});
        CHECK_FALSE(r.pass);
        bool found = false;
        for (const auto& e : r.eigenvalues) found = found || std::abs(e.value - cplx(0.02)) <= 1e-6;
        CHECK(found);
    }
}

TEST_CASE("essential spectrum curves")
{
    const double c = 0.37;
    SUBCASE("even Nagumo limit has a closed form")
    {
        ModelParams p = nagumo_preset(0.1);
        for (Side side : {Side::Minus, Side::Plus}) {
            const EssentialCurves e = essential_curves(p, c, 0.1, side, CurveOperator::EvenLimit, 181);
            REQUIRE(e.lambda.size() == 1);
            const double fp = side == Side::Minus ? -0.1 : -0.9;
            double dev = 0.0;
            for (size_t k = 0; k < e.y.size(); ++k) {
                const double y = e.y[k];
                dev = std::max(dev, std::abs(e.lambda[0][k] - cplx(fp - (1.0 - std::cos(2.0 * y)), -c * y)));
            }
            CHECK(dev <= 1e-12);
            CHECK(e.max_re == doctest::Approx(fp));
        }
    }
    SUBCASE("odd FHN limit has a closed form")
    {
        const ModelParams p = fhn_corollary_preset();
        const EssentialCurves e = essential_curves(p, c, 0.05, Side::Minus, CurveOperator::OddLimit, 181);
        REQUIRE(e.lambda.size() == 1);
        for (size_t k = 0; k < e.y.size(); ++k)
            CHECK(std::abs(e.lambda[0][k] - cplx(-p.odd.rho * p.odd.gamma, -c * e.y[k])) <= 1e-12);
    }
    SUBCASE("full curves are stable, conjugate symmetric and periodic")
    {
        const ModelParams p = fhn_corollary_preset();
        for (Side side : {Side::Minus, Side::Plus}) {
            const EssentialCurves e = essential_curves(p, c, 0.05, side, CurveOperator::Full, 361);
            CHECK(e.max_re < 0.0);
            // y -> -y conjugates every branch set.
            const size_t K = e.y.size();
            REQUIRE(std::abs(e.y.front() + e.y.back()) <= 1e-12);
            for (size_t k = 0; k < K; ++k)
                for (const auto& br : e.lambda) {
                    const cplx z = std::conj(br[k]);
                    double best = INFINITY;
                    for (const auto& other : e.lambda) best = std::min(best, std::abs(other[K - 1 - k] - z));
                    CHECK(best <= 1e-10);
                }
            CHECK(periodicity_check(e, p, c, 0.05, side) <= 1e-12);
            const EssentialCurves still = essential_curves(p, 0.0, 0.05, side, CurveOperator::Full, 361);
            CHECK(periodicity_check(still, p, 0.0, 0.05, side) <= 1e-12);
        }
    }
}
