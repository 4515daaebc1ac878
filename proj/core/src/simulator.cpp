#include "latwave/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "latwave/banded.hpp"
#include "latwave/grid.hpp"
#include "latwave/wave_solver.hpp"

namespace latwave {

LatticeSystem LatticeSystem::lde(const ModelParams& p)
{
    LatticeSystem s;
    s.period = 2;
    s.spacing = 1.0;
    s.coupling[0] = p.diffusion;
    s.coupling[1] = p.diffusion / (p.eps * p.eps);
    s.reaction = {p.even, p.odd};
    s.rest_minus = {p.rest_minus_even, p.rest_minus_odd};
    s.rest_plus = {p.rest_plus_even, p.rest_plus_odd};
    s.n = p.n();
    s.k = p.k();
    return s;
}

LatticeSystem LatticeSystem::even_limit(const ModelParams& p)
{
    LatticeSystem s;
    s.period = 1;
    s.spacing = 2.0;
    s.coupling[0] = s.coupling[1] = 0.5 * p.diffusion;
    s.reaction = {p.even, p.even};
    s.rest_minus = {p.rest_minus_even, p.rest_minus_even};
    s.rest_plus = {p.rest_plus_even, p.rest_plus_even};
    s.n = p.n();
    s.k = p.k();
    return s;
}

LatticeState make_state(const LatticeSystem& s, long j_lo, long j_hi, Boundary bc)
{
    if (j_hi < j_lo) throw std::invalid_argument("make_state: empty window");
    LatticeState st;
    st.j_lo = j_lo;
    st.j_hi = j_hi;
    st.bc = bc;
    const long S = st.sites();
    st.u.resize(S * s.n);
    st.w.resize(S * s.k);
    for (long i = 0; i < S; ++i) {
        const Vec& r = s.rest_minus[s.parity(j_lo + i)];
        for (int q = 0; q < s.n; ++q) st.u[i * s.n + q] = r[q];
        for (int q = 0; q < s.k; ++q) st.w[i * s.k + q] = r[s.n + q];
    }
    return st;
}

namespace {

// u of site index i (relative to the window) with boundary handling.
double u_at(const LatticeState& st, const LatticeSystem& s, long i, int q)
{
    const long S = st.sites();
    if (i >= 0 && i < S) return st.u[i * s.n + q];
    if (st.bc == Boundary::Periodic) return st.u[((i % S + S) % S) * s.n + q];
    const long j = st.j_lo + i;
    return i < 0 ? s.rest_minus[s.parity(j)][q] : s.rest_plus[s.parity(j)][q];
}

void reaction_terms(const LatticeState& st, const LatticeSystem& s, Vec& fu, Vec& gw)
{
    const long S = st.sites();
    const int d = s.n + s.k;
    fu.resize(S * s.n);
    gw.resize(S * s.k);
    double U[8], F[8];
    for (long i = 0; i < S; ++i) {
        for (int q = 0; q < s.n; ++q) U[q] = st.u[i * s.n + q];
        for (int q = 0; q < s.k; ++q) U[s.n + q] = st.w[i * s.k + q];
        eval_reaction(s.reaction[s.parity(st.j_lo + i)], U, F);
        for (int q = 0; q < s.n; ++q) fu[i * s.n + q] = F[q];
        for (int q = 0; q < s.k; ++q) gw[i * s.k + q] = F[s.n + q];
    }
    (void)d;
}

}  // namespace

void rhs(const LatticeState& st, const LatticeSystem& s, Vec& du, Vec& dw)
{
    reaction_terms(st, s, du, dw);
    const long S = st.sites();
    for (long i = 0; i < S; ++i) {
        const Vec& dj = s.coupling[s.parity(st.j_lo + i)];
        for (int q = 0; q < s.n; ++q)
            du[i * s.n + q] += dj[q] * (u_at(st, s, i + 1, q) + u_at(st, s, i - 1, q) - 2.0 * st.u[i * s.n + q]);
    }
}

double rk4_dt_bound(const LatticeSystem& s)
{
    double dmax = 0.0;
    for (const Vec& c : s.coupling) dmax = std::max(dmax, c.maxCoeff());
    return 2.78 / (4.0 * dmax);
}

struct Integrator::Impl {
    const LatticeSystem* sys;
    Scheme scheme;
    long sites = 0;
    Boundary bc;
    long j_lo = 0;
    SpMat<double> A;  // diffusion on u (sites*n)
    Vec b;            // affine boundary forcing
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::SparseMatrix<double> Bexp;  // I + dt/2 A
};

Integrator::Integrator(const LatticeSystem& s, const LatticeState& shape, double dt, Scheme scheme)
    : impl_(std::make_unique<Impl>()), dt_(dt)
{
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (scheme == Scheme::RK4 && dt > rk4_dt_bound(s))
        throw std::invalid_argument("rk4 time step " + std::to_string(dt) + " exceeds stability bound " +
                                    std::to_string(rk4_dt_bound(s)));
    Impl& m = *impl_;
    m.sys = &s;
    m.scheme = scheme;
    m.sites = shape.sites();
    m.bc = shape.bc;
    m.j_lo = shape.j_lo;
    if (scheme == Scheme::RK4) return;
    const long S = m.sites, n = s.n, N = S * n;
    std::vector<Eigen::Triplet<double>> t;
    m.b = Vec::Zero(N);
    for (long i = 0; i < S; ++i) {
        const long j = shape.j_lo + i;
        const Vec& dj = s.coupling[s.parity(j)];
        for (int q = 0; q < n; ++q) {
            const long row = i * n + q;
            t.emplace_back(row, row, -2.0 * dj[q]);
            for (long nb : {i - 1, i + 1}) {
                if (nb >= 0 && nb < S) {
                    t.emplace_back(row, nb * n + q, dj[q]);
                } else if (shape.bc == Boundary::Periodic) {
                    const long w = (nb % S + S) % S;
                    t.emplace_back(row, w * n + q, dj[q]);
                } else {
                    const Vec& r = nb < 0 ? s.rest_minus[s.parity(j - 1)] : s.rest_plus[s.parity(j + 1)];
                    m.b[row] += dj[q] * r[q];
                }
            }
        }
    }
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(t.begin(), t.end());
    Eigen::SparseMatrix<double> I(N, N);
    I.setIdentity();
    Eigen::SparseMatrix<double> Aimp = I - 0.5 * dt * A;
    m.Bexp = I + 0.5 * dt * A;
    m.lu.compute(Aimp);
    if (m.lu.info() != Eigen::Success) throw std::runtime_error("IMEX factorization failed");
}

Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;

void Integrator::step(LatticeState& st) const
{
    const Impl& m = *impl_;
    const LatticeSystem& s = *m.sys;
    const double dt = dt_;
    if (m.scheme == Scheme::RK4) {
        Vec k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
        LatticeState tmp = st;
        rhs(st, s, k1u, k1w);
        tmp.u = st.u + 0.5 * dt * k1u;
        tmp.w = st.w + 0.5 * dt * k1w;
        rhs(tmp, s, k2u, k2w);
        tmp.u = st.u + 0.5 * dt * k2u;
        tmp.w = st.w + 0.5 * dt * k2w;
        rhs(tmp, s, k3u, k3w);
        tmp.u = st.u + dt * k3u;
        tmp.w = st.w + dt * k3w;
        rhs(tmp, s, k4u, k4w);
        st.u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        st.w += dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        st.t += dt;
        return;
    }
    // Crank-Nicolson on diffusion, Heun on the reaction.
    Vec f0, g0;
    reaction_terms(st, s, f0, g0);
    const Vec base = m.Bexp * st.u + dt * m.b;
    LatticeState pred = st;
    pred.u = m.lu.solve(Vec(base + dt * f0));
    pred.w = st.w + dt * g0;
    Vec f1, g1;
    reaction_terms(pred, s, f1, g1);
    st.u = m.lu.solve(Vec(base + 0.5 * dt * (f0 + f1)));
    st.w = st.w + 0.5 * dt * (g0 + g1);
    st.t += dt;
}

LatticeState step(const LatticeState& st, const LatticeSystem& s, double dt, Scheme scheme)
{
    Integrator I(s, st, dt, scheme);
    LatticeState out = st;
    I.step(out);
    return out;
}

Trajectory simulate(const LatticeSystem& s, LatticeState init, double dt, double T, double snapshot_every,
                    Scheme scheme)
{
    Integrator I(s, init, dt, scheme);
    Trajectory traj;
    const long nsteps = std::lround(T / dt);
    const long every = std::max(1L, std::lround(snapshot_every / dt));
    const double t0 = init.t;
    traj.push_back({init.t, init});
    for (long k = 1; k <= nsteps; ++k) {
        I.step(init);
        init.t = t0 + k * dt;
        if (k % every == 0 || k == nsteps) traj.push_back({init.t, init});
    }
    return traj;
}

LatticeState sample_wave_to_lattice(const FullWave& wave, double t, long j_lo, long j_hi)
{
    const Profile& U = wave.profile;
    const int d = U.ncomp / 2;
    const int n = U.widths[0], k = U.widths[1];
    LatticeState st;
    st.j_lo = j_lo;
    st.j_hi = j_hi;
    st.t = t;
    const long S = st.sites();
    st.u.resize(S * n);
    st.w.resize(S * k);
    for (long i = 0; i < S; ++i) {
        const long j = j_lo + i;
        const int off = (j % 2 != 0) ? 0 : d;
        const double xi = static_cast<double>(j) + wave.c * t;
        for (int q = 0; q < n; ++q) st.u[i * n + q] = interpolate(U, off + q, xi);
        for (int q = 0; q < k; ++q) st.w[i * k + q] = interpolate(U, off + n + q, xi);
    }
    return st;
}

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const size_t n = x.size();
    LineFit f;
    if (n < 2) return f;
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        sse += e * e;
    }
    f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
    return f;
}

}  // namespace

SpeedFit measure_speed(const Trajectory& traj, const LatticeSystem& s, double level)
{
    std::vector<double> ts, xs;
    const size_t start = traj.size() / 2;
    for (size_t k = start; k < traj.size(); ++k) {
        const LatticeState& st = traj[k].state;
        double pos = std::numeric_limits<double>::quiet_NaN();
        long prev = -1;
        for (long i = 0; i < st.sites(); ++i) {
            if (s.parity(st.j_lo + i) != 0) continue;
            if (prev >= 0) {
                const double a = st.u[prev * s.n] - level, b = st.u[i * s.n] - level;
                if ((a < 0) != (b < 0) || a == 0.0) {
                    const double frac = a == b ? 0.0 : a / (a - b);
                    pos = s.spacing * (static_cast<double>(st.j_lo + prev) + frac * (i - prev));
                    break;
                }
            }
            prev = i;
        }
        if (std::isnan(pos)) throw std::runtime_error("no coherent interface");
        ts.push_back(traj[k].t);
        xs.push_back(pos);
    }
    const LineFit f = fit_line(ts, xs);
    return {-f.slope, f.r2};
}

std::vector<double> normal_samples(unsigned long long seed, size_t count)
{
    std::mt19937_64 gen(seed);
    auto uni = [&]() { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53; };
    std::vector<double> out;
    out.reserve(count + 1);
    while (out.size() < count) {
        const double r = std::sqrt(-2.0 * std::log(uni())), th = 2.0 * M_PI * uni();
        out.push_back(r * std::cos(th));
        out.push_back(r * std::sin(th));
    }
    out.resize(count);
    return out;
}

namespace {

double lp_norm(const Vec& a, double p)
{
    if (std::isinf(p)) return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i]), p);
    return std::pow(s, 1.0 / p);
}

Vec stacked(const LatticeState& st)
{
    Vec v(st.u.size() + st.w.size());
    v << st.u, st.w;
    return v;
}

}  // namespace

StabilityResult stability_experiment(const FullWave& wave, const ModelParams& p, const Perturbation& pert,
                                     double norm_p, const StabilityOptions& opt)
{
    const LatticeSystem sys = LatticeSystem::lde(p);
    LatticeState ref = sample_wave_to_lattice(wave, 0.0, opt.j_lo, opt.j_hi);
    ref.bc = Boundary::Clamped;
    LatticeState st = ref;
    const long S = st.sites();
    const int n = sys.n;

    // Perturb the u components around the site of the largest even-site u.
    long center = 0;
    double best = -1e300;
    for (long i = 0; i < S; ++i)
        if (sys.parity(st.j_lo + i) == 0 && st.u[i * n] > best) {
            best = st.u[i * n];
            center = i;
        }
    if (pert.amplitude != 0.0) {
        const std::vector<double> z = normal_samples(pert.seed, static_cast<size_t>(S * n));
        for (long i = 0; i < S; ++i)
            for (int q = 0; q < n; ++q) {
                double v = 0.0;
                if (pert.shape == Perturbation::Shape::Gaussian) {
                    const double x = static_cast<double>(i - center) / pert.width;
                    v = pert.amplitude * std::exp(-0.5 * x * x) * z[i * n + q];
                } else if (i == center) {
                    v = pert.amplitude * (z[i * n + q] < 0 ? -1.0 : 1.0);
                }
                st.u[i * n + q] += v;
            }
    }

    Integrator I(sys, st, opt.dt, opt.scheme);
    StabilityResult res;
    const long nsteps = std::lround(opt.T / opt.dt);
    const long every = std::max(1L, std::lround(opt.snapshot_every / opt.dt));

    // d(t) = min_theta || state - (ref + S(t+theta) - S(t)) ||_p
    auto distance = [&](double t, double theta_guess, double& theta_out) {
        const Vec base = stacked(st) - stacked(ref) + stacked(sample_wave_to_lattice(wave, t, opt.j_lo, opt.j_hi));
        auto f = [&](double th) {
            return lp_norm(base - stacked(sample_wave_to_lattice(wave, t + th, opt.j_lo, opt.j_hi)), norm_p);
        };
        double a = theta_guess - 2.0, b = theta_guess + 2.0;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = f(x2);
            }
        }
        const double th = 0.5 * (a + b);
        const double f0 = f(0.0), fth = f(th);
        theta_out = fth <= f0 ? th : 0.0;
        return std::min(fth, f0);
    };

    double theta = 0.0;
    for (long k = 0; k <= nsteps; ++k) {
        if (k > 0) {
            I.step(st);
            I.step(ref);
        }
        if (k % every == 0 || k == nsteps) {
            const double t = k * opt.dt;
            const double dval = distance(t, theta, theta);
            res.times.push_back(t);
            res.distances.push_back(dval);
            res.thetas.push_back(theta);
            if (dval > 10.0 * std::max(res.distances.front(), 1e-300) && res.distances.front() > 0.0) {
                res.unstable = true;
                break;
            }
        }
    }
    res.theta_tilde = res.thetas.empty() ? 0.0 : res.thetas.back();
    const double dmax = *std::max_element(res.distances.begin(), res.distances.end());
    if (!res.unstable && dmax > 1e-12) {
        // Fit the second half of the decay before it reaches the round-off floor.
        size_t end = 0;
        while (end < res.distances.size() && res.distances[end] > 1e-9 * dmax) ++end;
        std::vector<double> x, y;
        for (size_t i = end / 2; i < end; ++i) {
            x.push_back(res.times[i]);
            y.push_back(std::log(res.distances[i]));
        }
        const LineFit f = fit_line(x, y);
        res.beta = -f.slope;
        res.C = std::exp(f.intercept);
        res.r2 = f.r2;
        res.fit_done = x.size() >= 2;
    }
    return res;
}

}  // namespace latwave
