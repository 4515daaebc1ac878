#include "latwave/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "latwave/eigensolver.hpp"

namespace latwave {

namespace {

double residual_free(const OperatorMatrix& L, const VecT<cplx>& v, cplx lam)
{
    return (L.apply(v) + lam * v).norm() / v.norm();
}

// Pairs of -L nearest a temporal shift, as temporal eigenvalues.
EigsReport temporal_eigs(const SpMat<cplx>& negA, cplx shift, int count)
{
    return eigs_near(negA, shift, count);
}

SpMat<cplx> negated(const OperatorMatrix& L)
{
    SpMat<cplx> M = -L.complex_matrix();
    M.makeCompressed();
    return M;
}

// Image of the translation mode under lambda -> lambda + i k pi c: the wave
// derivative modulated by exp(i k pi xi), odd blocks flipped for odd k.
VecT<cplx> modulated(const Profile& lay, const Vec& d, long k, double c)
{
    const int nc = lay.ncomp;
    std::vector<double> sign(nc, 1.0);
    int off = 0;
    for (size_t b = 0; b < lay.blocks.size(); ++b) {
        const bool odd = lay.blocks[b] == "u_o" || lay.blocks[b] == "w_o";
        for (int q = 0; q < lay.widths[b]; ++q) sign[off + q] = odd && (k % 2 != 0) ? -1.0 : 1.0;
        off += lay.widths[b];
    }
    const double dir = c > 0.0 ? -1.0 : 1.0;
    VecT<cplx> m(d.size());
    for (long i = 0; i < lay.nodes(); ++i) {
        const cplx ph = std::polar(1.0, dir * k * M_PI * lay.grid.xi(i));
        for (int q = 0; q < nc; ++q) m[i * nc + q] = sign[q] * ph * d[i * nc + q];
    }
    return m;
}

bool less_canonical(const CertifiedEigenvalue& a, const CertifiedEigenvalue& b)
{
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() < b.value.imag();
}

}  // namespace

KernelCandidate kernel_check(const OperatorMatrix& L, const Vec& wave_derivative)
{
    const SpMat<cplx> M = negated(L);
    const EigsReport rep = temporal_eigs(M, cplx(0.0), 2);
    if (rep.pairs.empty()) throw std::runtime_error("kernel check: eigensolver returned nothing");
    KernelCandidate k;
    const EigenPair& e = rep.pairs.front();
    k.value = e.value;
    k.residual = residual_free(L, e.vector, e.value);
    const VecT<cplx> d = wave_derivative.cast<cplx>();
    k.cosine = std::abs(d.dot(e.vector)) / (d.norm() * e.vector.norm());
    k.second = rep.pairs.size() > 1 ? rep.pairs[1].value : cplx(INFINITY, 0.0);
    return k;
}

double numerical_abscissa(const OperatorMatrix& L, const ModelParams& p)
{
    const Profile& lay = L.layout;
    const int nc = lay.ncomp;
    const long N = lay.nodes();
    // Per-component weights of the symmetrizing inner product.
    Vec wc = Vec::Ones(nc);
    int off = 0;
    for (size_t b = 0; b < lay.blocks.size(); ++b) {
        const std::string& name = lay.blocks[b];
        for (int q = 0; q < lay.widths[b]; ++q) {
            double s = 1.0;
            if (name == "u_o") s = L.eps > 0.0 ? L.eps : 1.0;
            const bool odd_w = name == "w_o", even_w = name == "w_e" || name == "w";
            if (odd_w && p.odd.kind == Reaction::Kind::FHN) s = 1.0 / std::sqrt(p.odd.rho);
            if (even_w && p.even.kind == Reaction::Kind::FHN) s = 1.0 / std::sqrt(p.even.rho);
            wc[off + q] = s;
        }
        off += lay.widths[b];
    }
    Vec S(N * nc);
    for (long i = 0; i < N; ++i) S.segment(i * nc, nc) = wc;
    const SpMat<double> A = L.real_matrix();
    const SpMat<double> At = A.transpose();
    auto op = [&](const VecT<cplx>& x) {
        // 1/2 (S(-A)S^-1 + S^-1(-A^T)S) x
        VecT<cplx> a = x.cwiseQuotient(S.cast<cplx>());
        VecT<cplx> y1 = (A.cast<cplx>() * a).cwiseProduct(S.cast<cplx>());
        VecT<cplx> b = x.cwiseProduct(S.cast<cplx>());
        VecT<cplx> y2 = (At.cast<cplx>() * b).cwiseQuotient(S.cast<cplx>());
        return VecT<cplx>(-0.5 * (y1 + y2));
    };
    auto id = [](const VecT<cplx>& x) { return x; };
    return lanczos_max(static_cast<int>(N * nc), op, id, 200, 1e-10, 0xab5c155aULL);
}

nlohmann::json SpectrumReport::to_json() const
{
    nlohmann::json j;
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : eigenvalues)
        ev.push_back({{"re", e.value.real()},
                      {"im", e.value.imag()},
                      {"residual", e.residual},
                      {"translation_image", e.image},
                      {"image_cosine", e.image_cosine}});
    j["eigenvalues"] = ev;
    j["kernel_candidate"] = {{"re", kernel.value.real()},
                             {"im", kernel.value.imag()},
                             {"residual", kernel.residual},
                             {"cosine", kernel.cosine}};
    j["gap"] = gap;
    j["strip"] = {{"re_min", re_min}, {"re_max", re_max}, {"im_max", im_max}, {"abscissa", abscissa},
                  {"disks", disks.size()}, {"uncertified_windows", uncertified}};
    j["verdict"] = pass ? "pass" : "fail";
    j["message"] = message;
    return j;
}

SpectrumReport strip_scan(const OperatorMatrix& L, const ModelParams& p, const Vec& wave_derivative,
                          const StripOptions& opt)
{
    if (!(opt.lambda_star > 0.0)) throw std::invalid_argument("lambda_star must be positive");
    SpectrumReport rep;
    rep.kernel = kernel_check(L, wave_derivative);
    rep.gap = std::abs(rep.kernel.second);
    rep.abscissa = numerical_abscissa(L, p);
    rep.re_min = -opt.lambda_star;
    rep.re_max = std::max(rep.abscissa, 0.0) + 1e-3;
    rep.im_max = opt.height_factor * M_PI * std::abs(L.c);
    const SpMat<cplx> M = negated(L);

    struct Found {
        ShiftDisk disk;
        std::vector<CertifiedEigenvalue> eig;
    };
    std::vector<Found> found;
    auto run = [&](cplx center, int count) {
        Found f;
        f.disk.center = center;
        EigsOptions eo;
        eo.max_restarts = opt.max_restarts;
        const EigsReport r = eigs_near(M, center, count, eo);
        // The disk extends up to the first Ritz value that fails its
        // residual certificate; with a full certified set, to the farthest.
        double rad = 0.0;
        for (const auto& e : r.pairs) {
            rad = std::abs(e.value - center);
            const double res = residual_free(L, e.vector, e.value);
            if (res > 1e-8) break;
            CertifiedEigenvalue ce{e.value, res};
            if (std::abs(L.c) > 0.0) {
                const long k = std::lround(e.value.imag() / (M_PI * std::abs(L.c)));
                if (k != 0) {
                    const VecT<cplx> m = modulated(L.layout, wave_derivative, k, L.c);
                    ce.image_cosine = std::abs(m.dot(e.vector)) / (m.norm() * e.vector.norm());
                    if (ce.image_cosine >= opt.image_cosine) ce.image = static_cast<int>(k);
                }
            }
            f.eig.push_back(ce);
        }
        f.disk.radius = rad * (1.0 - 1e-9);
        return f;
    };

    // Sweep each column of R upwards from the real axis; the lower half
    // follows by conjugation.  A disk of radius r centred in a column of
    // half-width hw certifies the band |Im - y| <= sqrt(r^2 - hw^2).
    const double width = rep.re_max - rep.re_min;
    int ncol = 1;
    for (;;) {
        found.clear();
        rep.uncertified = 0;
        bool too_wide = false;
        for (int col = 0; col < ncol && !too_wide; ++col) {
            const double x0 = rep.re_min + width * col / ncol, x1 = rep.re_min + width * (col + 1) / ncol;
            const double xc = 0.5 * (x0 + x1), hw = 0.5 * (x1 - x0);
            double top = 0.0, y = 0.0, last_hh = opt.min_step;
            bool first = true;
            while (top < rep.im_max) {
                Found f = run(cplx(xc, y), opt.count);
                const double r = f.disk.radius;
                const double hh = r > hw ? std::sqrt(r * r - hw * hw) : 0.0;
                found.push_back(std::move(f));
                if (first && hh < 0.05 * hw && ncol < opt.max_columns) {
                    too_wide = true;
                    break;
                }
                if (hh > 0.0 && (first || y - hh <= top)) {
                    top = y + hh;
                    last_hh = hh;
                    y = top + 0.9 * hh;
                    first = false;
                } else if (first || y - top < opt.min_step) {
                    // Nothing certifiable near this shift; skip a band.
                    ++rep.uncertified;
                    top = y + std::max(hh, opt.min_step);
                    y = top + std::max(last_hh, opt.min_step);
                    first = false;
                } else {
                    y = top + 0.5 * (y - top);
                }
            }
        }
        if (!too_wide) break;
        ncol *= 2;
    }

    // Adjacent-window consistency: an eigenvalue seen by one disk and lying
    // inside another must be seen by that one too.
    auto contains = [](const std::vector<CertifiedEigenvalue>& v, cplx z) {
        for (const auto& e : v)
            if (std::abs(e.value - z) <= 1e-6 * (1.0 + std::abs(z))) return true;
        return false;
    };
    for (size_t a = 0; a < found.size(); ++a)
        for (size_t b = 0; b < found.size(); ++b) {
            if (a == b) continue;
            for (const auto& e : found[a].eig) {
                if (std::abs(e.value - found[b].disk.center) < found[b].disk.radius * (1.0 - 1e-6) &&
                    !contains(found[b].eig, e.value))
                    throw std::runtime_error("strip scan: adjacent shift windows disagree; refine the shift lattice");
            }
        }

    std::vector<CertifiedEigenvalue> all;
    for (const auto& f : found) {
        rep.disks.push_back(f.disk);
        for (const auto& e : f.eig) {
            for (cplx z : {e.value, std::conj(e.value)}) {
                if (z.real() < rep.re_min || std::abs(z.imag()) > rep.im_max) continue;
                const bool mirrored = z != e.value;
                if (!contains(all, z)) all.push_back({z, e.residual, mirrored ? -e.image : e.image, e.image_cosine});
            }
        }
    }
    std::sort(all.begin(), all.end(), less_canonical);
    rep.eigenvalues = all;

    int kernel = 0, other = 0, images = 0;
    cplx worst(0.0);
    for (const auto& e : all) {
        if (std::abs(e.value) <= opt.kernel_radius)
            ++kernel;
        else if (e.image != 0)
            ++images;
        else if (other++ == 0 || e.value.real() > worst.real())
            worst = e.value;
    }
    rep.pass = kernel == 1 && other == 0 && rep.uncertified == 0;
    if (rep.pass) {
        rep.message = "only the translation eigenvalue lies in R";
        if (images > 0) rep.message += " (with " + std::to_string(images) + " of its i pi c images)";
    } else if (other == 0 && kernel == 1) {
        rep.message = std::to_string(rep.uncertified) + " window(s) of R could not be certified";
    } else if (kernel != 1) {
        rep.message = "translation eigenvalue count in R is " + std::to_string(kernel);
    } else {
        rep.message = std::to_string(other) + " non-translation eigenvalue(s) in R, rightmost " +
                      std::to_string(worst.real()) + (worst.imag() >= 0 ? "+" : "") + std::to_string(worst.imag()) +
                      "i";
    }
    return rep;
}

namespace {

// Characteristic matrix -(c z I + B(z)) at z = iy for the chosen operator.
MatT<cplx> char_matrix(const ModelParams& p, double c, double eps, Side side, CurveOperator op, double y)
{
    const int n = p.n(), k = p.k(), d = n + k;
    const cplx iy(0.0, y);
    const Vec& Uo = side == Side::Minus ? p.rest_minus_odd : p.rest_plus_odd;
    const Vec& Ue = side == Side::Minus ? p.rest_minus_even : p.rest_plus_even;
    if (op == CurveOperator::OddLimit) {
        const Mat J = jac_reaction(p.odd, Uo);
        MatT<cplx> B(k, k);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) B(a, b) = (a == b ? c * iy : cplx(0.0)) - J(n + a, n + b);
        return -B;
    }
    if (op == CurveOperator::EvenLimit) {
        const Mat J = jac_reaction(p.even, Ue);
        MatT<cplx> B(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) B(a, b) = (a == b ? c * iy : cplx(0.0)) - J(a, b);
        for (int q = 0; q < n; ++q) B(q, q) += p.diffusion[q] * (1.0 - std::cos(2.0 * y));
        return -B;
    }
    const double ie2 = 1.0 / (eps * eps);
    const Mat Jo = jac_reaction(p.odd, Uo), Je = jac_reaction(p.even, Ue);
    MatT<cplx> B = MatT<cplx>::Zero(2 * d, 2 * d);
    for (int a = 0; a < d; ++a) {
        B(a, a) += c * iy;
        B(d + a, d + a) += c * iy;
        for (int b = 0; b < d; ++b) {
            B(a, b) -= Jo(a, b);
            B(d + a, d + b) -= Je(a, b);
        }
    }
    for (int q = 0; q < n; ++q) {
        const double D = p.diffusion[q];
        B(q, q) += 2.0 * ie2 * D;
        B(q, d + q) -= 2.0 * std::cos(y) * ie2 * D;
        B(d + q, d + q) += 2.0 * D;
        B(d + q, q) -= 2.0 * std::cos(y) * D;
    }
    return -B;
}

std::vector<cplx> roots_at(const ModelParams& p, double c, double eps, Side side, CurveOperator op, double y)
{
    const MatT<cplx> M = char_matrix(p, c, eps, side, op, y);
    Eigen::ComplexEigenSolver<MatT<cplx>> es(M, false);
    std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return r;
}

double set_distance(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double d = 0.0;
    for (cplx x : a) {
        double m = INFINITY;
        for (cplx z : b) m = std::min(m, std::abs(x - z));
        d = std::max(d, m);
    }
    for (cplx x : b) {
        double m = INFINITY;
        for (cplx z : a) m = std::min(m, std::abs(x - z));
        d = std::max(d, m);
    }
    return d;
}

}  // namespace

EssentialCurves essential_curves(const ModelParams& p, double c, double eps, Side side, CurveOperator op, int samples)
{
    if (samples < 2) throw std::invalid_argument("essential_curves: need at least two samples");
    EssentialCurves out;
    std::vector<cplx> prev;
    out.max_re = -INFINITY;
    for (int s = 0; s < samples; ++s) {
        const double y = -M_PI + 2.0 * M_PI * s / (samples - 1);
        std::vector<cplx> r = roots_at(p, c, eps, side, op, y);
        if (s == 0) {
            std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
                return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
            });
            out.lambda.assign(r.size(), {});
        } else {
            // Greedy continuation: each branch takes its nearest remaining root.
            std::vector<cplx> ordered(r.size());
            std::vector<bool> used(r.size(), false);
            for (size_t b = 0; b < prev.size(); ++b) {
                size_t best = 0;
                double bd = INFINITY;
                for (size_t q = 0; q < r.size(); ++q)
                    if (!used[q] && std::abs(r[q] - prev[b]) < bd) {
                        bd = std::abs(r[q] - prev[b]);
                        best = q;
                    }
                used[best] = true;
                ordered[b] = r[best];
            }
            r = ordered;
        }
        out.y.push_back(y);
        for (size_t b = 0; b < r.size(); ++b) {
            out.lambda[b].push_back(r[b]);
            out.max_re = std::max(out.max_re, r[b].real());
        }
        prev = r;
    }
    return out;
}

double periodicity_check(const EssentialCurves& curves, const ModelParams& p, double c, double eps, Side side,
                         CurveOperator op)
{
    double dev = 0.0;
    const cplx shift(0.0, -2.0 * M_PI * c);
    for (size_t k = 0; k < curves.y.size(); ++k) {
        std::vector<cplx> here;
        for (const auto& br : curves.lambda) here.push_back(br[k] + shift);
        const std::vector<cplx> there = roots_at(p, c, eps, side, op, curves.y[k] + 2.0 * M_PI);
        dev = std::max(dev, set_distance(here, there));
    }
    return dev;
}

double point_periodicity(const OperatorMatrix& L)
{
    const SpMat<cplx> M = negated(L);
    const cplx s(0.0, -2.0 * M_PI * L.c);
    const EigsReport a = eigs_near(M, cplx(0.0), 1);
    const EigsReport b = eigs_near(M, s, 1);
    if (a.pairs.empty() || b.pairs.empty()) return INFINITY;
    return std::abs(b.pairs.front().value - s - a.pairs.front().value);
}

}  // namespace latwave
