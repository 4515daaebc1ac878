#include "latwave/singular_limit.hpp"

#include <algorithm>
#include <cmath>

#include "latwave/banded.hpp"
#include "latwave/eigensolver.hpp"
#include "latwave/linearization.hpp"
#include "latwave/simulator.hpp"

namespace latwave {

namespace {

double sup_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Profile residual_even(const Profile& even, double c, bool left, const ModelParams& p)
{
    const Grid& g = even.grid;
    const int n = p.n(), nc = even.ncomp;
    Profile R = even;
    const Profile dU = upwind_derivative(even, left);
    std::vector<Vec> s2(n);
    for (int q = 0; q < n; ++q) s2[q] = shift_sum(g, even.component(q), 2, even.clamp_minus[q], even.clamp_plus[q]);
    std::vector<double> F(nc);
    for (long i = 0; i < g.nodes(); ++i) {
        eval_reaction(p.even, &even.data[i * nc], F.data());
        for (int r = 0; r < nc; ++r) {
            double v = c * dU.at(i, r) - F[r];
            if (r < n) v -= 0.5 * p.diffusion[r] * (s2[r][i] - 2.0 * even.at(i, r));
            R.at(i, r) = v;
        }
    }
    return R;
}

Vec weighted(const Grid& g, int nc, const Vec& v)
{
    Vec a(v.size());
    for (long i = 0; i < g.nodes(); ++i)
        for (int q = 0; q < nc; ++q) a[i * nc + q] = quad_weight(g, i) * v[i * nc + q];
    return a;
}

// Cubic Lagrange through lattice sites at positions spacing * (j_lo + l).
double sample_sites(const Vec& vals, int stride, int q, double spacing, long j_lo, double x, double lo, double hi)
{
    const long S = vals.size() / stride;
    const double s = x / spacing - static_cast<double>(j_lo);
    if (s <= 0.0) return s < -1.0 ? lo : vals[q];
    if (s >= S - 1) return s > S ? hi : vals[(S - 1) * stride + q];
    long i0 = static_cast<long>(std::floor(s)) - 1;
    i0 = std::clamp(i0, 0L, S - 4);
    const double t = s - i0;
    double out = 0.0;
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (t - b) / static_cast<double>(a - b);
        out += w * vals[(i0 + a) * stride + q];
    }
    return out;
}

}  // namespace

Profile residual_even_limit(const Profile& even, double c, const ModelParams& p)
{
    return residual_even(even, c, upwind_left(c), p);
}

EvenSeed generate_even_seed(const ModelParams& p, const Grid& g, const SeedOptions& opt)
{
    const LatticeSystem sys = LatticeSystem::even_limit(p);
    const long half = opt.sites / 2;
    LatticeState st = make_state(sys, -half, half, Boundary::Clamped);
    const int n = sys.n, k = sys.k;
    const bool pulse = p.rest_minus_even.isApprox(p.rest_plus_even, 1e-12);
    if (pulse) {
        // Excite a bump and leave a refractory region behind it so that only
        // the left-moving pulse survives.
        const double x0 = 0.4 * opt.sites, bw = opt.bump_width;
        for (long i = 0; i < st.sites(); ++i) {
            const double x = sys.spacing * (st.j_lo + i);
            if (std::abs(x - x0) <= 0.5 * bw)
                for (int q = 0; q < n; ++q) st.u[i * n + q] = 1.0;
            else if (x > x0 + 0.5 * bw && x <= x0 + 2.5 * bw)
                for (int q = 0; q < k; ++q) st.w[i * k + q] = 0.3;
        }
    } else {
        for (long i = 0; i < st.sites(); ++i)
            if (st.j_lo + i >= 0) {
                for (int q = 0; q < n; ++q) st.u[i * n + q] = p.rest_plus_even[q];
                for (int q = 0; q < k; ++q) st.w[i * k + q] = p.rest_plus_even[n + q];
            }
    }
    Trajectory traj;
    traj = simulate(sys, st, opt.dt, opt.sim_time, 1.0, Scheme::IMEX_CN);
    const LatticeState& fin = traj.back().state;
    const double umax = fin.u.maxCoeff(), umin = fin.u.minCoeff();
    if (!(umax - umin > 1e-3)) throw std::runtime_error("seed generation failed: no wave formed in the even lattice");
    const double level = 0.5 * (umax + umin);
    SpeedFit fit;
    try {
        fit = measure_speed(traj, sys, level);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("seed generation failed: ") + e.what());
    }

    // Leftmost crossing of the final state.
    double xc = 0.0;
    bool found = false;
    for (long i = 1; i < fin.sites() && !found; ++i) {
        const double a = fin.u[(i - 1) * n] - level, b = fin.u[i * n] - level;
        if ((a < 0) != (b < 0)) {
            xc = sys.spacing * (fin.j_lo + i - 1 + a / (a - b));
            found = true;
        }
    }
    if (!found) throw std::runtime_error("seed generation failed: no level crossing");

    EvenSeed seed;
    seed.profile = make_even_profile(g, p);
    for (long i = 0; i < g.nodes(); ++i) {
        const double x = xc + (g.xi(i) - opt.front_xi);
        for (int q = 0; q < n; ++q)
            seed.profile.at(i, q) = sample_sites(fin.u, n, q, sys.spacing, fin.j_lo, x, p.rest_minus_even[q],
                                                 p.rest_plus_even[q]);
        for (int q = 0; q < k; ++q)
            seed.profile.at(i, n + q) = sample_sites(fin.w, k, q, sys.spacing, fin.j_lo, x,
                                                     p.rest_minus_even[n + q], p.rest_plus_even[n + q]);
    }
    seed.c = fit.speed;
    seed.speed_r2 = fit.r2;
    return seed;
}

EvenLimitSolution solve_even_limit(const ModelParams& p, const Grid& g, const Profile* seed, double seed_c,
                                   const NewtonOptions& opt, const SeedOptions& seed_opt)
{
    EvenLimitSolution sol;
    Profile S;
    if (seed) {
        S = *seed;
    } else {
        EvenSeed es = generate_even_seed(p, g, seed_opt);
        S = es.profile;
        seed_c = es.c;
        sol.seed_speed = es.c;
        sol.seed_speed_r2 = es.speed_r2;
    }
    const int nc = S.ncomp;
    const bool left = upwind_left(seed_c);
    const Vec a = weighted(g, nc, upwind_derivative(S, left).data);
    Profile U = S;
    double c = seed_c;

    for (int it = 0;; ++it) {
        const Profile R = residual_even(U, c, left, p);
        const double r = sup_norm(R.data);
        sol.history.push_back(r);
        if (r <= opt.tol) {
            sol.iterations = it;
            break;
        }
        if (it >= opt.max_iter || !std::isfinite(r))
            throw NewtonFailure("even-limit Newton did not converge (residual " + std::to_string(r) + ")",
                                sol.history);
        const OperatorMatrix Le = assemble_Le(U, c, p, left);
        MatT<double> B = upwind_derivative(U, left).data;
        MatT<double> C = a;
        BorderedLU<double> blu;
        try {
            blu.factor(Le.A, B, C, MatT<double>::Zero(1, 1));
        } catch (const SingularMatrixError&) {
            throw NewtonFailure("phase condition degenerate", sol.history);
        }
        Vec dx, dy;
        Vec g1(1);
        g1[0] = -a.dot(U.data - S.data);
        blu.solve(-R.data, g1, dx, dy);
        double t = 1.0;
        for (;; t *= 0.5) {
            Profile Ut = U;
            Ut.data += t * dx;
            const double rt = sup_norm(residual_even(Ut, c + t * dy[0], left, p).data);
            if (std::isfinite(rt) && (rt < r || t < 1.0 / 64)) {
                U = std::move(Ut);
                c += t * dy[0];
                break;
            }
        }
    }
    sol.profile = U;
    sol.c0 = c;
    sol.residual = sol.history.back();
    return sol;
}

Profile odd_u_from_even(const Profile& even, const ModelParams& p)
{
    const Grid& g = even.grid;
    const int n = p.n();
    Profile out = Profile::make(g, {"u_o"}, {n}, p.rest_minus_odd.head(n), p.rest_plus_odd.head(n));
    for (int q = 0; q < n; ++q)
        out.set_component(q, 0.5 * shift_sum(g, even.component(q), 1, even.clamp_minus[q], even.clamp_plus[q]));
    return out;
}

Profile solve_odd_w(const Profile& even, double c0, const ModelParams& p, double* residual_out)
{
    const Grid& g = even.grid;
    const int n = p.n(), k = p.k(), d = n + k;
    Profile w = Profile::make(g, {"w_o"}, {k}, p.rest_minus_odd.tail(k), p.rest_plus_odd.tail(k));
    if (k == 0) {
        if (residual_out) *residual_out = 0.0;
        return w;
    }
    if (std::abs(c0) < 1e-12) throw std::runtime_error("odd recovery ODE degenerate");
    const Profile u = odd_u_from_even(even, p);
    for (long i = 0; i < g.nodes(); ++i)
        for (int q = 0; q < k; ++q) w.at(i, q) = p.rest_minus_odd[n + q];
    const bool left = upwind_left(c0);
    std::vector<double> U(d), F(d);
    auto residual = [&](const Profile& W) {
        Profile dW = upwind_derivative(W, left);
        Vec R(g.nodes() * k);
        for (long i = 0; i < g.nodes(); ++i) {
            for (int q = 0; q < n; ++q) U[q] = u.at(i, q);
            for (int q = 0; q < k; ++q) U[n + q] = W.at(i, q);
            eval_reaction(p.odd, U.data(), F.data());
            for (int q = 0; q < k; ++q) R[i * k + q] = c0 * dW.at(i, q) - F[n + q];
        }
        return R;
    };
    double r = 0.0;
    for (int it = 0; it < 30; ++it) {
        Vec R = residual(w);
        r = sup_norm(R);
        if (r <= 1e-12) break;
        const OperatorMatrix Lo = assemble_Lo(u, w, c0, p);
        BandLU<double> lu(Lo.A);
        Vec dx = -R;
        lu.solve(dx);
        w.data += dx;
    }
    r = sup_norm(residual(w));
    if (!(r <= 1e-10)) throw std::runtime_error("odd recovery solve did not converge (residual " + std::to_string(r) + ")");
    if (residual_out) *residual_out = r;
    return w;
}

AdjointKernel compute_adjoint_kernel(const Profile& even, double c0, const ModelParams& p)
{
    const Grid& g = even.grid;
    const int nc = even.ncomp;
    const bool left = upwind_left(c0);
    const OperatorMatrix adj = assemble_LeAdj(even, c0, p, left);
    EigsOptions eo;
    eo.tol = 1e-12;
    const EigsReport rep = eigs_near(adj.A, cplx(0.0), 1, eo);
    if (rep.pairs.empty()) throw std::runtime_error("adjoint kernel not found (HS1 violated or grid too coarse)");
    const EigenPair& ep = rep.pairs.front();
    if (std::abs(ep.value) > 1e-4)
        throw std::runtime_error("adjoint kernel not found (HS1 violated or grid too coarse)");
    // Rotate to a real vector.
    Eigen::Index imax = 0;
    ep.vector.cwiseAbs().maxCoeff(&imax);
    const cplx ph = std::conj(ep.vector[imax]) / std::abs(ep.vector[imax]);
    Vec v = (ep.vector * ph).real();
    const Vec dU = upwind_derivative(even, left).data;
    const double pair = inner(g, nc, dU, v);
    if (std::abs(pair) < 1e-8 * v.norm() * dU.norm() * g.h())
        throw std::runtime_error("non-simple or misaligned kernel");
    v /= pair;
    AdjointKernel K;
    K.adjoint = even;
    K.adjoint.blocks = {"phi_u", "phi_w"};
    K.adjoint.data = v;
    K.adjoint.clamp_minus.setZero();
    K.adjoint.clamp_plus.setZero();
    K.eigenvalue = ep.value.real();
    K.residual = (adj.A * v).norm() / v.norm();
    return K;
}

Profile SingularPulse::full() const
{
    const Grid& g = even.grid;
    const int n = odd_u.ncomp, k = odd_w.ncomp, d = n + k;
    Vec cm(2 * d), cp(2 * d);
    cm << odd_u.clamp_minus, odd_w.clamp_minus, even.clamp_minus;
    cp << odd_u.clamp_plus, odd_w.clamp_plus, even.clamp_plus;
    Profile U = Profile::make(g, {"u_o", "w_o", "u_e", "w_e"}, {n, k, n, k}, cm, cp);
    for (long i = 0; i < g.nodes(); ++i) {
        for (int q = 0; q < n; ++q) U.at(i, q) = odd_u.at(i, q);
        for (int q = 0; q < k; ++q) U.at(i, n + q) = odd_w.at(i, q);
        for (int q = 0; q < d; ++q) U.at(i, d + q) = even.at(i, q);
    }
    return U;
}

Vec SingularPulse::adjoint_full() const
{
    const Grid& g = even.grid;
    const int d = even.ncomp;
    Vec out = Vec::Zero(g.nodes() * 2 * d);
    for (long i = 0; i < g.nodes(); ++i)
        for (int q = 0; q < d; ++q) out[i * 2 * d + d + q] = adjoint.at(i, q);
    return out;
}

SingularPulse build_singular_pulse(const ModelParams& p, const Grid& g, const NewtonOptions& opt,
                                   const SeedOptions& seed_opt)
{
    SingularPulse sp;
    const EvenLimitSolution es = solve_even_limit(p, g, nullptr, 0.0, opt, seed_opt);
    sp.even = es.profile;
    sp.c0 = es.c0;
    sp.residual_even = es.residual;
    sp.iterations = es.iterations;
    sp.seed_speed = es.seed_speed;
    sp.seed_speed_r2 = es.seed_speed_r2;
    sp.odd_u = odd_u_from_even(sp.even, p);
    sp.odd_w = solve_odd_w(sp.even, sp.c0, p, &sp.residual_odd_w);
    const AdjointKernel K = compute_adjoint_kernel(sp.even, sp.c0, p);
    sp.adjoint = K.adjoint;
    sp.adjoint_eigenvalue = K.eigenvalue;
    sp.adjoint_residual = K.residual;
    sp.pairing = inner(g, sp.even.ncomp, upwind_derivative(sp.even, upwind_left(sp.c0)).data, sp.adjoint.data);
    return sp;
}

}  // namespace latwave
