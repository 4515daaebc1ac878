#include "latwave/wave_solver.hpp"

#include <algorithm>
#include <cmath>

#include "latwave/banded.hpp"
#include "latwave/linearization.hpp"

namespace latwave {

namespace {

double sup_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Profile residual_dir(const Profile& U, double c, bool left, const ModelParams& p)
{
    const Grid& g = U.grid;
    const int n = p.n(), d = p.block_dim(), nc = 2 * d;
    if (U.ncomp != nc) throw std::invalid_argument("residual_full: not a 4-block profile");
    const double ie2 = 1.0 / (p.eps * p.eps);
    const Profile dU = upwind_derivative(U, left);
    std::vector<Vec> so(n), se(n);
    for (int q = 0; q < n; ++q) {
        so[q] = shift_sum(g, U.component(q), 1, U.clamp_minus[q], U.clamp_plus[q]);
        se[q] = shift_sum(g, U.component(d + q), 1, U.clamp_minus[d + q], U.clamp_plus[d + q]);
    }
    Profile R = U;
    std::vector<double> Fo(d), Fe(d);
    for (long i = 0; i < g.nodes(); ++i) {
        eval_reaction(p.odd, &U.data[i * nc], Fo.data());
        eval_reaction(p.even, &U.data[i * nc + d], Fe.data());
        for (int r = 0; r < d; ++r) {
            double ro = c * dU.at(i, r) - Fo[r];
            double re = c * dU.at(i, d + r) - Fe[r];
            if (r < n) {
                const double D = p.diffusion[r];
                ro -= ie2 * D * (se[r][i] - 2.0 * U.at(i, r));
                re -= D * (so[r][i] - 2.0 * U.at(i, d + r));
            }
            R.at(i, r) = ro;
            R.at(i, d + r) = re;
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

Profile with_data(const Profile& layout, const Vec& v, bool zero_clamps)
{
    Profile P = layout;
    P.data = v;
    if (zero_clamps) {
        P.clamp_minus.setZero();
        P.clamp_plus.setZero();
    }
    return P;
}

}  // namespace

Profile residual_full(const Profile& U, double c, const ModelParams& p)
{
    return residual_dir(U, c, upwind_left(c), p);
}

double boundary_deviation(const Profile& U)
{
    const long N = U.nodes(), w = std::min<long>(2L * U.grid.m, N);
    double dev = 0.0;
    for (long i = 0; i < w; ++i)
        for (int q = 0; q < U.ncomp; ++q) {
            dev = std::max(dev, std::abs(U.at(i, q) - U.clamp_minus[q]));
            dev = std::max(dev, std::abs(U.at(N - 1 - i, q) - U.clamp_plus[q]));
        }
    return dev;
}

FullWave newton_solve(const ModelParams& p, const Profile& seed, double seed_c, const NewtonOptions& opt,
                      const Profile* start, double start_c)
{
    const Grid& g = seed.grid;
    const int nc = seed.ncomp;
    const bool left = upwind_left(seed_c);
    const Vec a = weighted(g, nc, upwind_derivative(seed, left).data);
    Profile U = start ? *start : seed;
    double c = start ? start_c : seed_c;
    FullWave out;
    out.eps = p.eps;
    for (int it = 0;; ++it) {
        const Profile R = residual_dir(U, c, left, p);
        // A started iteration must also satisfy the phase condition.
        const double r = std::max(sup_norm(R.data), std::abs(a.dot(U.data - seed.data)));
        out.history.push_back(r);
        if (r <= opt.tol) {
            out.iterations = it;
            break;
        }
        if (it >= opt.max_iter || !std::isfinite(r))
            throw NewtonFailure("Newton did not converge at eps=" + std::to_string(p.eps) + " (residual " +
                                    std::to_string(r) + ")",
                                out.history);
        const OperatorMatrix L = assemble_Leps(U, c, p.eps, 0.0, p, left);
        MatT<double> B = upwind_derivative(U, left).data;
        MatT<double> C = a;
        BorderedLU<double> blu;
        try {
            blu.factor(L.A, B, C, MatT<double>::Zero(1, 1));
        } catch (const SingularMatrixError&) {
            throw NewtonFailure("phase condition degenerate", out.history);
        }
        Vec dx, dy;
        Vec g1(1);
        g1[0] = -a.dot(U.data - seed.data);
        blu.solve(-R.data, g1, dx, dy);
        for (double t = 1.0;; t *= 0.5) {
            Profile Ut = U;
            Ut.data += t * dx;
            const double rt = std::max(sup_norm(residual_dir(Ut, c + t * dy[0], left, p).data),
                                       std::abs(a.dot(Ut.data - seed.data)));
            if (std::isfinite(rt) && (rt < r || t < 1.0 / 64)) {
                U = std::move(Ut);
                c += t * dy[0];
                break;
            }
        }
    }
    out.profile = U;
    out.c = c;
    out.residual_sup = sup_norm(residual_dir(U, c, left, p).data);
    out.boundary_residual = boundary_deviation(U);
    return out;
}

ContinuationResult continue_in_eps(const ModelParams& p, const std::vector<double>& ladder, const SingularPulse& sp,
                                   const NewtonOptions& opt)
{
    if (ladder.empty()) throw std::invalid_argument("eps ladder is empty");
    for (size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0)) throw std::invalid_argument("eps ladder entries must be positive");
        if (i > 0 && !(ladder[i] < ladder[i - 1])) throw std::invalid_argument("eps ladder must be strictly decreasing");
    }
    const Profile U0 = sp.full();
    ContinuationResult res;
    const Profile* start = nullptr;
    double start_c = sp.c0;
    for (double eps : ladder) {
        ModelParams q = p;
        q.eps = eps;
        try {
            res.waves.push_back(newton_solve(q, U0, sp.c0, opt, start, start_c));
        } catch (const std::exception& e) {
            res.error = e.what();
            res.failed_eps = eps;
            return res;
        }
        const FullWave& w = res.waves.back();
        start = &res.waves.back().profile;
        start_c = w.c;
        const Profile Phi = with_data(U0, w.profile.data - U0.data, true);
        const Norms nm = norms(Phi);
        const Profile dPhi = derivative(Phi);
        const Norms nd = norms(dPhi, ScalingWeights{ScalingWeights::Variant::M1, eps});
        ContinuationRow row;
        row.eps = eps;
        row.phi_l2 = nm.l2;
        row.phi_h1 = nm.h1;
        row.scaled_deriv = nd.l2;
        row.dc = std::abs(w.c - sp.c0);
        row.c = w.c;
        row.iterations = w.iterations;
        row.residual = w.residual_sup;
        res.table.push_back(row);
    }
    res.complete = true;
    return res;
}

Vec residual_term_E0(const SingularPulse& sp, const ModelParams& p)
{
    return -residual_dir(sp.full(), sp.c0, upwind_left(sp.c0), p).data;
}

Vec nonlinear_even(const Profile& even0, const Vec& phi_e, const ModelParams& p)
{
    const int d = even0.ncomp;
    const long N = even0.nodes();
    Vec out(N * d);
    std::vector<double> U(d), F0(d), F1(d), J(d * d);
    for (long i = 0; i < N; ++i) {
        for (int q = 0; q < d; ++q) U[q] = even0.at(i, q);
        eval_reaction(p.even, U.data(), F0.data());
        jac_reaction(p.even, U.data(), J.data());
        for (int q = 0; q < d; ++q) U[q] += phi_e[i * d + q];
        eval_reaction(p.even, U.data(), F1.data());
        for (int r = 0; r < d; ++r) {
            double lin = 0.0;
            for (int q = 0; q < d; ++q) lin += J[r * d + q] * phi_e[i * d + q];
            out[i * d + r] = F1[r] - F0[r] - lin;
        }
    }
    return out;
}

double c_delta(const Vec& phi_e, double delta, const SingularPulse& sp, const ModelParams& p)
{
    const Grid& g = sp.even.grid;
    const int d = sp.even.ncomp;
    const Profile phi = with_data(sp.even, phi_e, true);
    const Vec dphi = upwind_derivative(phi, upwind_left(sp.c0)).data;
    const Vec& adj = sp.adjoint.data;
    const double den = 1.0 + inner(g, d, dphi, adj);
    if (!(den >= 0.5)) throw std::runtime_error("outside eta* ball");
    const double num = delta * inner(g, d, phi_e, adj) + inner(g, d, nonlinear_even(sp.even, phi_e, p), adj);
    return sp.c0 + num / den;
}

FixedPointResult fixed_point_solve(const ModelParams& p, double delta, const SingularPulse& sp,
                                   const FixedPointOptions& opt)
{
    const Profile U0 = sp.full();
    const Grid& g = U0.grid;
    const int nc = U0.ncomp, d = nc / 2;
    const long N = g.nodes();
    const bool left = upwind_left(sp.c0);
    const Vec E0 = residual_term_E0(sp, p);
    const Profile dU0 = upwind_derivative(U0, left);
    const OperatorMatrix L = assemble_Leps(U0, sp.c0, p.eps, delta, p, left);
    BandLU<double> lu;
    try {
        lu.factor(L.real_matrix());
    } catch (const SingularMatrixError&) {
        throw std::runtime_error("contraction failed; reduce eps or adjust delta");
    }
    // Full-layout N(Phi) = F(U0 + Phi) - F(U0) - DF(U0) Phi on both parities.
    auto nonlinear_full = [&](const Vec& phi) {
        Vec out(N * nc);
        std::vector<double> U(d), F0(d), F1(d), J(d * d);
        for (long i = 0; i < N; ++i)
            for (int par = 0; par < 2; ++par) {
                const Reaction& r = par == 0 ? p.odd : p.even;
                const long base = i * nc + par * d;
                for (int q = 0; q < d; ++q) U[q] = U0.data[base + q];
                eval_reaction(r, U.data(), F0.data());
                jac_reaction(r, U.data(), J.data());
                for (int q = 0; q < d; ++q) U[q] += phi[base + q];
                eval_reaction(r, U.data(), F1.data());
                for (int a = 0; a < d; ++a) {
                    double lin = 0.0;
                    for (int q = 0; q < d; ++q) lin += J[a * d + q] * phi[base + q];
                    out[base + a] = F1[a] - F0[a] - lin;
                }
            }
        return out;
    };
    auto even_part = [&](const Vec& phi) {
        Vec e(N * d);
        for (long i = 0; i < N; ++i)
            for (int q = 0; q < d; ++q) e[i * d + q] = phi[i * nc + d + q];
        return e;
    };

    FixedPointResult res;
    Vec phi = Vec::Zero(N * nc);
    double c = sp.c0;
    int growth = 0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        c = c_delta(even_part(phi), delta, sp, p);
        const Vec dphi = upwind_derivative(with_data(U0, phi, true), left).data;
        Vec rhs = (sp.c0 - c) * (dU0.data + dphi) + E0 + nonlinear_full(phi) + delta * phi;
        lu.solve(rhs);
        const double dist = norms(with_data(U0, rhs - phi, true)).h1;
        phi = rhs;
        res.distances.push_back(dist);
        res.iterations = it;
        if (!std::isfinite(dist)) throw std::runtime_error("contraction failed; reduce eps or adjust delta");
        const size_t k = res.distances.size();
        growth = (k >= 2 && dist > res.distances[k - 2]) ? growth + 1 : 0;
        if (growth >= 3) throw std::runtime_error("contraction failed; reduce eps or adjust delta");
        if (dist < opt.tol) break;
    }
    if (!(res.distances.back() < opt.tol))
        throw std::runtime_error("contraction failed; reduce eps or adjust delta (distance " +
                                 std::to_string(res.distances.back()) + " after " + std::to_string(opt.max_iter) +
                                 " iterations)");
    c = c_delta(even_part(phi), delta, sp, p);
    double logsum = 0.0;
    int cnt = 0;
    for (size_t k = 1; k < res.distances.size(); ++k)
        if (res.distances[k] > 0.0 && res.distances[k - 1] > 0.0) {
            logsum += std::log(res.distances[k] / res.distances[k - 1]);
            ++cnt;
        }
    res.ratio = cnt ? std::exp(logsum / cnt) : 0.0;
    FullWave& w = res.wave;
    w.profile = U0;
    w.profile.data += phi;
    w.c = c;
    w.eps = p.eps;
    w.residual_sup = sup_norm(residual_dir(w.profile, c, left, p).data);
    w.boundary_residual = boundary_deviation(w.profile);
    w.iterations = res.iterations;
    w.history = res.distances;
    return res;
}

}  // namespace latwave
