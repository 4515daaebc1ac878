#include "latwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latwave {

void Grid::validate() const
{
    if (L <= 0) throw std::invalid_argument("grid half-length L must be a positive integer");
    if (m <= 0) throw std::invalid_argument("grid steps_per_unit m must be a positive integer");
}

Profile Profile::make(const Grid& g, std::vector<std::string> blocks, std::vector<int> widths,
                      const Vec& clamp_minus, const Vec& clamp_plus)
{
    Profile p;
    p.grid = g;
    p.blocks = std::move(blocks);
    p.widths = std::move(widths);
    p.ncomp = 0;
    for (int w : p.widths) p.ncomp += w;
    if (clamp_minus.size() != p.ncomp || clamp_plus.size() != p.ncomp)
        throw std::invalid_argument("profile clamp vectors do not match block widths");
    p.clamp_minus = clamp_minus;
    p.clamp_plus = clamp_plus;
    p.data = Vec::Zero(static_cast<Eigen::Index>(g.nodes()) * p.ncomp);
    return p;
}

int Profile::block_offset(const std::string& name) const
{
    int off = 0;
    for (size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b] == name) return off;
        off += widths[b];
    }
    return -1;
}

Vec Profile::component(int c) const
{
    Vec v(nodes());
    for (int i = 0; i < nodes(); ++i) v[i] = at(i, c);
    return v;
}

void Profile::set_component(int c, const Vec& v)
{
    for (int i = 0; i < nodes(); ++i) at(i, c) = v[i];
}

Profile make_full_profile(const Grid& g, const ModelParams& p)
{
    const int n = p.n(), k = p.k(), d = n + k;
    Vec cm(2 * d), cp(2 * d);
    cm << p.rest_minus_odd, p.rest_minus_even;
    cp << p.rest_plus_odd, p.rest_plus_even;
    return Profile::make(g, {"u_o", "w_o", "u_e", "w_e"}, {n, k, n, k}, cm, cp);
}

Profile make_even_profile(const Grid& g, const ModelParams& p)
{
    return Profile::make(g, {"u", "w"}, {p.n(), p.k()}, p.rest_minus_even, p.rest_plus_even);
}

static inline double clamped(const Vec& phi, long i, double cm, double cp)
{
    if (i < 0) return cm;
    if (i >= phi.size()) return cp;
    return phi[i];
}

Vec shift_sum(const Grid& g, const Vec& phi, int i, double cm, double cp)
{
    const long s = static_cast<long>(i) * g.m;
    const long N = phi.size();
    Vec out(N);
    for (long j = 0; j < N; ++j) out[j] = clamped(phi, j + s, cm, cp) + clamped(phi, j - s, cm, cp);
    return out;
}

Vec delta_mix(const Grid& g, const Vec& phi, const Vec& psi, double psi_minus, double psi_plus)
{
    return shift_sum(g, psi, 1, psi_minus, psi_plus) - 2.0 * phi;
}

Vec derivative(const Grid& g, const Vec& phi)
{
    const long N = phi.size();
    if (N < 3) throw std::invalid_argument("derivative needs at least 3 nodes");
    const double h = g.h();
    Vec d(N);
    for (long i = 1; i + 1 < N; ++i) d[i] = (phi[i + 1] - phi[i - 1]) / (2 * h);
    d[0] = (-3 * phi[0] + 4 * phi[1] - phi[2]) / (2 * h);
    d[N - 1] = (3 * phi[N - 1] - 4 * phi[N - 2] + phi[N - 3]) / (2 * h);
    return d;
}

Vec upwind_derivative(const Grid& g, const Vec& phi, double cm, double cp, bool left)
{
    const long N = phi.size();
    const double h2 = 2.0 * g.h();
    Vec d(N);
    if (left) {
        for (long i = 0; i < N; ++i)
            d[i] = (3 * phi[i] - 4 * clamped(phi, i - 1, cm, cp) + clamped(phi, i - 2, cm, cp)) / h2;
    } else {
        for (long i = 0; i < N; ++i)
            d[i] = (-3 * phi[i] + 4 * clamped(phi, i + 1, cm, cp) - clamped(phi, i + 2, cm, cp)) / h2;
    }
    return d;
}

Profile upwind_derivative(const Profile& p, bool left)
{
    Profile d = p;
    for (int c = 0; c < p.ncomp; ++c)
        d.set_component(c, upwind_derivative(p.grid, p.component(c), p.clamp_minus[c], p.clamp_plus[c], left));
    d.clamp_minus.setZero();
    d.clamp_plus.setZero();
    return d;
}

Profile derivative(const Profile& p)
{
    Profile d = p;
    for (int c = 0; c < p.ncomp; ++c) d.set_component(c, derivative(p.grid, p.component(c)));
    d.clamp_minus.setZero();
    d.clamp_plus.setZero();
    return d;
}

Vec component_scaling(const Profile& p, const ScalingWeights& w)
{
    Vec f = Vec::Ones(p.ncomp);
    const bool scale_u = w.variant != ScalingWeights::Variant::M2;
    const bool scale_w = w.variant != ScalingWeights::Variant::M1;
    int off = 0;
    for (size_t b = 0; b < p.blocks.size(); ++b) {
        const bool hit = (p.blocks[b] == "u_o" && scale_u) || (p.blocks[b] == "w_o" && scale_w);
        if (hit)
            for (int c = 0; c < p.widths[b]; ++c) f[off + c] = w.eps;
        off += p.widths[b];
    }
    return f;
}

Vec apply_scaling(const Profile& layout, const ScalingWeights& w, const Vec& v)
{
    const Vec f = component_scaling(layout, w);
    Vec out = v;
    const long N = layout.nodes();
    for (long i = 0; i < N; ++i)
        for (int c = 0; c < layout.ncomp; ++c) out[i * layout.ncomp + c] *= f[c];
    return out;
}

double quad_weight(const Grid& g, long i)
{
    return (i == 0 || i == g.nodes() - 1) ? 0.5 * g.h() : g.h();
}

double inner(const Grid& g, int ncomp, const Vec& a, const Vec& b)
{
    const long N = g.nodes();
    double s = 0.0;
    for (long i = 0; i < N; ++i) {
        double t = 0.0;
        for (int c = 0; c < ncomp; ++c) t += a[i * ncomp + c] * b[i * ncomp + c];
        s += quad_weight(g, i) * t;
    }
    return s;
}

Norms norms(const Profile& p, std::optional<ScalingWeights> w)
{
    Profile q = p;
    if (w) q.data = apply_scaling(p, *w, p.data);
    Norms out;
    const Profile d = derivative(q);
    const double l2sq = inner(q.grid, q.ncomp, q.data, q.data);
    out.l2 = std::sqrt(l2sq);
    out.h1 = std::sqrt(l2sq + inner(q.grid, q.ncomp, d.data, d.data));
    out.sup = q.data.size() ? q.data.cwiseAbs().maxCoeff() : 0.0;
    return out;
}

double interpolate(const Profile& p, int c, double xi)
{
    const double s = (xi + p.grid.L) * p.grid.m;  // fractional node index
    const double r = std::round(s);
    if (std::abs(s - r) <= 1e-9) return p.value(static_cast<long>(r), c);
    const double fl = std::floor(s);
    const long i = static_cast<long>(fl);
    const double t = s - fl;
    const double y0 = p.value(i - 1, c), y1 = p.value(i, c), y2 = p.value(i + 1, c), y3 = p.value(i + 2, c);
    // Lagrange basis on nodes -1, 0, 1, 2.
    const double l0 = -t * (t - 1) * (t - 2) / 6.0;
    const double l1 = (t + 1) * (t - 1) * (t - 2) / 2.0;
    const double l2 = -(t + 1) * t * (t - 2) / 2.0;
    const double l3 = (t + 1) * t * (t - 1) / 6.0;
    return l0 * y0 + l1 * y1 + l2 * y2 + l3 * y3;
}

}  // namespace latwave
