#include "latwave/linearization.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "latwave/eigensolver.hpp"
#include "latwave/singular_limit.hpp"
#include "latwave/wave_solver.hpp"

namespace latwave {

std::string to_string(OpKind k)
{
    switch (k) {
    case OpKind::Le: return "Le";
    case OpKind::LeAdj: return "LeAdj";
    case OpKind::Lo: return "Lo";
    case OpKind::LepsLambda: return "LepsLambda";
    }
    return "?";
}

namespace {

// Triplet collector over (node, component) pairs.  Columns outside the grid
// are dropped: perturbations vanish beyond [-L, L].
struct Builder {
    long nodes;
    int nc;
    std::vector<Eigen::Triplet<double>> t;

    Builder(long nodes_, int nc_) : nodes(nodes_), nc(nc_) { t.reserve(static_cast<size_t>(nodes) * nc * 12); }

    void add(long i, int r, long j, int c, double v)
    {
        if (j < 0 || j >= nodes || v == 0.0) return;
        t.emplace_back(static_cast<int>(i * nc + r), static_cast<int>(j * nc + c), v);
    }

    // coef * upwind d/dxi of component r, written into row (i, r).
    void deriv(long i, int r, double coef, double h, bool left)
    {
        const double s = coef / (2.0 * h);
        if (left) {
            add(i, r, i, r, 3.0 * s);
            add(i, r, i - 1, r, -4.0 * s);
            add(i, r, i - 2, r, s);
        } else {
            add(i, r, i, r, -3.0 * s);
            add(i, r, i + 1, r, 4.0 * s);
            add(i, r, i + 2, r, -s);
        }
    }

    SpMat<double> build() const
    {
        SpMat<double> A(nodes * nc, nodes * nc);
        A.setFromTriplets(t.begin(), t.end());
        A.makeCompressed();
        return A;
    }
};

Profile layout_of(const Profile& p)
{
    Profile l = p;
    l.data.setZero();
    return l;
}

}  // namespace

SpMat<double> OperatorMatrix::real_matrix() const
{
    if (lambda.imag() != 0.0) throw std::logic_error("real_matrix: lambda has an imaginary part");
    SpMat<double> M = A;
    if (lambda.real() != 0.0) {
        SpMat<double> I(A.rows(), A.cols());
        I.setIdentity();
        M += lambda.real() * I;
    }
    return M;
}

SpMat<cplx> OperatorMatrix::complex_matrix() const
{
    SpMat<cplx> M = A.cast<cplx>();
    if (lambda != 0.0) {
        SpMat<cplx> I(A.rows(), A.cols());
        I.setIdentity();
        M += lambda * I;
    }
    return M;
}

VecT<cplx> OperatorMatrix::apply(const VecT<cplx>& v) const
{
    return A.cast<cplx>() * v + lambda * v;
}

Vec OperatorMatrix::apply(const Vec& v) const
{
    if (lambda.imag() != 0.0) throw std::logic_error("apply: complex lambda on a real vector");
    return A * v + lambda.real() * v;
}

OperatorMatrix assemble_Le(const Profile& even, double c, const ModelParams& p, std::optional<bool> left_opt)
{
    const Grid& g = even.grid;
    const int n = p.n(), nc = even.ncomp;
    if (nc != p.block_dim()) throw std::invalid_argument("assemble_Le: base profile is not an even-limit profile");
    const bool left = left_opt.value_or(upwind_left(c));
    Builder b(g.nodes(), nc);
    std::vector<double> J(nc * nc);
    const long s2 = 2L * g.m;
    for (long i = 0; i < g.nodes(); ++i) {
        jac_reaction(p.even, &even.data[i * nc], J.data());
        for (int r = 0; r < nc; ++r) {
            b.deriv(i, r, c, g.h(), left);
            if (r < n) {
                const double D = p.diffusion[r];
                b.add(i, r, i + s2, r, -0.5 * D);
                b.add(i, r, i - s2, r, -0.5 * D);
                b.add(i, r, i, r, D);
            }
            for (int q = 0; q < nc; ++q) b.add(i, r, i, q, -J[r * nc + q]);
        }
    }
    OperatorMatrix op;
    op.kind = OpKind::Le;
    op.c = c;
    op.eps = 0.0;
    op.base_id = "even-limit";
    op.layout = layout_of(even);
    op.A = b.build();
    return op;
}

OperatorMatrix assemble_LeAdj(const Profile& even, double c, const ModelParams& p, std::optional<bool> left)
{
    OperatorMatrix op = assemble_Le(even, c, p, left);
    op.kind = OpKind::LeAdj;
    SpMat<double> T = op.A.transpose();
    op.A = T;
    op.A.makeCompressed();
    return op;
}

OperatorMatrix assemble_Lo(const Profile& odd_u, const Profile& odd_w, double c, const ModelParams& p)
{
    const Grid& g = odd_w.grid;
    const int n = p.n(), k = p.k(), d = n + k;
    if (odd_w.ncomp != k || odd_u.ncomp != n) throw std::invalid_argument("assemble_Lo: base profile mismatch");
    const bool left = upwind_left(c);
    Builder b(g.nodes(), k);
    std::vector<double> U(d), J(d * d);
    for (long i = 0; i < g.nodes(); ++i) {
        for (int q = 0; q < n; ++q) U[q] = odd_u.at(i, q);
        for (int q = 0; q < k; ++q) U[n + q] = odd_w.at(i, q);
        jac_reaction(p.odd, U.data(), J.data());
        for (int r = 0; r < k; ++r) {
            b.deriv(i, r, c, g.h(), left);
            for (int q = 0; q < k; ++q) b.add(i, r, i, q, -J[(n + r) * d + n + q]);
        }
    }
    OperatorMatrix op;
    op.kind = OpKind::Lo;
    op.c = c;
    op.base_id = "odd-recovery";
    op.layout = layout_of(odd_w);
    op.A = b.build();
    return op;
}

OperatorMatrix assemble_Leps(const Profile& full, double c, double eps, cplx lambda, const ModelParams& p,
                             std::optional<bool> left_opt)
{
    const Grid& g = full.grid;
    const int n = p.n(), d = p.block_dim(), nc = 2 * d;
    if (full.ncomp != nc || !p.uniform_blocks())
        throw std::invalid_argument("assemble_Leps: base profile is not a full 4-block profile");
    const bool left = left_opt.value_or(upwind_left(c));
    const double ie2 = 1.0 / (eps * eps);
    Builder b(g.nodes(), nc);
    std::vector<double> Jo(d * d), Je(d * d);
    const long s1 = g.m;
    for (long i = 0; i < g.nodes(); ++i) {
        jac_reaction(p.odd, &full.data[i * nc], Jo.data());
        jac_reaction(p.even, &full.data[i * nc + d], Je.data());
        for (int r = 0; r < d; ++r) {
            // odd row r, even row d + r
            b.deriv(i, r, c, g.h(), left);
            b.deriv(i, d + r, c, g.h(), left);
            if (r < n) {
                const double D = p.diffusion[r];
                b.add(i, r, i, r, 2.0 * ie2 * D);
                b.add(i, r, i + s1, d + r, -ie2 * D);
                b.add(i, r, i - s1, d + r, -ie2 * D);
                b.add(i, d + r, i, d + r, 2.0 * D);
                b.add(i, d + r, i + s1, r, -D);
                b.add(i, d + r, i - s1, r, -D);
            }
            for (int q = 0; q < d; ++q) {
                b.add(i, r, i, q, -Jo[r * d + q]);
                b.add(i, d + r, i, d + q, -Je[r * d + q]);
            }
        }
    }
    OperatorMatrix op;
    op.kind = OpKind::LepsLambda;
    op.c = c;
    op.eps = eps;
    op.lambda = lambda;
    op.base_id = "full";
    op.layout = layout_of(full);
    op.A = b.build();
    return op;
}

void dump_matrix(const OperatorMatrix& op, std::ostream& os)
{
    os << "# kind=" << to_string(op.kind) << " eps=" << op.eps << " lambda=" << op.lambda.real() << ","
       << op.lambda.imag() << " rows=" << op.A.rows() << "\n";
    os << std::setprecision(17);
    SpMat<cplx> M = op.complex_matrix();
    const bool real = op.lambda.imag() == 0.0;
    for (int r = 0; r < M.outerSize(); ++r)
        for (SpMat<cplx>::InnerIterator it(M, r); it; ++it) {
            os << r << " " << it.col() << " " << it.value().real();
            if (!real) os << " " << it.value().imag();
            os << "\n";
        }
}

QuasiInverseResult quasi_inverse(const OperatorMatrix& L, const Vec& theta, const SingularPulse& sp)
{
    if (L.kind != OpKind::LepsLambda || L.lambda != 0.0)
        throw std::invalid_argument("quasi_inverse: needs L_{eps,lambda} at lambda = 0");
    const Grid& g = L.layout.grid;
    const int nc = L.layout.ncomp;
    const long N = g.nodes();
    const Profile U0 = sp.full();
    const Profile dU0 = upwind_derivative(U0, upwind_left(sp.c0));
    const Vec adj = sp.adjoint_full();
    Vec a(N * nc);
    for (long i = 0; i < N; ++i)
        for (int q = 0; q < nc; ++q) a[i * nc + q] = quad_weight(g, i) * adj[i * nc + q];

    MatT<double> B = -dU0.data;
    MatT<double> C = a;
    MatT<double> D = MatT<double>::Zero(1, 1);
    BorderedLU<double> blu;
    try {
        blu.factor(L.real_matrix(), B, C, D);
    } catch (const SingularMatrixError&) {
        throw std::runtime_error("quasi-inverse breakdown (eps too large or HS1/HS2 violated)");
    }
    Vec x, y;
    blu.solve(theta, Vec::Zero(1), x, y);
    QuasiInverseResult res;
    res.psi = x;
    res.gamma = y[0];
    res.residual = blu.last_residual();
    if (!(res.residual <= 1e-8)) throw std::runtime_error("quasi-inverse breakdown (residual " + std::to_string(res.residual) + ")");
    return res;
}

CoercivityResult coercivity_diag(const ModelParams& p, const FullWave& wave, cplx lambda)
{
    const Profile& U = wave.profile;
    const Grid& g = U.grid;
    const int nc = U.ncomp;
    const long N = g.nodes(), dim = N * nc;
    OperatorMatrix L = assemble_Leps(U, wave.c, wave.eps, lambda, p);
    SpMat<cplx> Lc = L.complex_matrix();
    CoercivityResult res;
    BandLU<cplx> lu;
    try {
        lu.factor(Lc);
    } catch (const SingularMatrixError&) {
        res.in_spectrum = true;
        return res;
    }
    const Vec f = component_scaling(U, {ScalingWeights::Variant::M12, wave.eps});
    Vec mwm(dim);  // M W M diagonal
    for (long i = 0; i < N; ++i)
        for (int q = 0; q < nc; ++q) mwm[i * nc + q] = f[q] * f[q] * quad_weight(g, i);
    const double h = g.h();
    // G_in = M (W + Df^T W Df) M with forward differences, zero beyond the grid.
    auto G_in = [&](const VecT<cplx>& x) {
        VecT<cplx> y(dim);
        for (long i = 0; i < N; ++i)
            for (int q = 0; q < nc; ++q) y[i * nc + q] = mwm[i * nc + q] * x[i * nc + q];
        VecT<cplx> dx(dim);
        for (long i = 0; i < N; ++i)
            for (int q = 0; q < nc; ++q) {
                const cplx next = i + 1 < N ? x[(i + 1) * nc + q] : cplx(0.0);
                dx[i * nc + q] = mwm[i * nc + q] * (next - x[i * nc + q]) / h;
            }
        // Df^T applied to the weighted differences
        for (long i = 0; i < N; ++i)
            for (int q = 0; q < nc; ++q) {
                const cplx prev = i > 0 ? dx[(i - 1) * nc + q] : cplx(0.0);
                y[i * nc + q] += (prev - dx[i * nc + q]) / h;
            }
        return y;
    };
    auto G_out = [&](const VecT<cplx>& x) {
        VecT<cplx> y = Lc * x;
        for (long i = 0; i < dim; ++i) y[i] *= mwm[i];
        return VecT<cplx>(Lc.adjoint() * y);
    };
    auto G_out_inv = [&](const VecT<cplx>& x) {
        VecT<cplx> y = x;
        lu.solve(y, 'C');
        for (long i = 0; i < dim; ++i) y[i] /= mwm[i];
        lu.solve(y, 'N');
        return y;
    };
    auto op = [&](const VecT<cplx>& x) { return G_out_inv(G_in(x)); };
    int used = 0;
    const double mu = lanczos_max(static_cast<int>(dim), op, G_out, 150, 1e-10, 0xc0e7c1ULL, &used);
    res.lanczos_steps = used;
    res.value = mu > 0.0 ? 1.0 / std::sqrt(mu) : 0.0;
    if (!(res.value > 1e-12)) {
        res.value = 0.0;
        res.in_spectrum = true;
    }
    return res;
}

}  // namespace latwave
