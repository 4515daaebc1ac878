#include "latwave/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

namespace latwave {

namespace {

using CVec = VecT<cplx>;
using CMat = MatT<cplx>;

CVec start_vector(int n, unsigned long long seed)
{
    std::mt19937_64 gen(seed);
    CVec v(n);
    for (int i = 0; i < n; ++i) {
        const double a = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
        const double b = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
        v[i] = cplx(a, b);
    }
    return v / v.norm();
}

bool nearer(const EigenPair& a, const EigenPair& b, cplx shift)
{
    const double da = std::abs(a.value - shift), db = std::abs(b.value - shift);
    if (da != db) return da < db;
    return a.value.imag() < b.value.imag();
}

template <class T>
double residual_of(const SpMat<T>& A, const CVec& v, cplx lam)
{
    CVec Av = A.template cast<cplx>() * v;
    return (Av - lam * v).norm() / v.norm();
}

template <class T>
EigsReport dense_eigs(const SpMat<T>& A, cplx shift, int count)
{
    CMat M = CMat(A.template cast<cplx>());
    Eigen::ComplexEigenSolver<CMat> es(M, true);
    std::vector<EigenPair> all;
    for (int i = 0; i < M.rows(); ++i) {
        EigenPair e;
        e.value = es.eigenvalues()[i];
        e.vector = es.eigenvectors().col(i).normalized();
        e.residual = residual_of(A, e.vector, e.value);
        all.push_back(std::move(e));
    }
    std::sort(all.begin(), all.end(), [&](const EigenPair& a, const EigenPair& b) { return nearer(a, b, shift); });
    all.resize(std::min<size_t>(all.size(), count));
    EigsReport r;
    r.pairs = std::move(all);
    r.shift_used = shift;
    r.converged = true;
    return r;
}

// Orthogonalize w against the first j columns of V (two CGS passes); writes
// the coefficients into h.
void orthogonalize(const CMat& V, int j, CVec& w, CVec& h)
{
    h = CVec::Zero(j);
    for (int pass = 0; pass < 2; ++pass) {
        CVec c = V.leftCols(j).adjoint() * w;
        w -= V.leftCols(j) * c;
        h += c;
    }
}

template <class T>
EigsReport krylov_eigs(const SpMat<T>& A, cplx shift, int count, const EigsOptions& opt)
{
    const int n = static_cast<int>(A.rows());
    EigsReport rep;
    SpMat<cplx> Ac = A.template cast<cplx>();
    BandLU<cplx> lu;
    cplx sigma = shift;
    for (int attempt = 0;; ++attempt) {
        try {
            lu.factor(Ac, -sigma);
            break;
        } catch (const SingularMatrixError&) {
            if (attempt >= 3) throw;
            sigma += 1e-8 * (1.0 + std::abs(sigma)) * cplx(1.0, 1.0);
            rep.shift_perturbed = true;
        }
    }
    // A shift sitting on an eigenvalue to round-off makes the Krylov basis
    // useless; step off it by a small relative amount.
    {
        const double scale = 1.0 + Ac.cwiseAbs().sum() / std::max(1, n);
        CVec x = start_vector(n, opt.seed ^ 0x9e3779b97f4a7c15ULL);
        lu.solve(x);
        if (!(x.norm() * scale < 1e10)) {
            sigma += 1e-6 * scale * cplx(1.0, 1.0);
            lu.factor(Ac, -sigma);
            rep.shift_perturbed = true;
        }
    }
    rep.shift_used = sigma;

    const int keep = std::min(n - 1, count + std::max(2, count / 2));
    int m = opt.krylov_dim > 0 ? opt.krylov_dim : std::max(2 * keep + 10, 30);
    m = std::min(m, n);

    CMat V = CMat::Zero(n, m + 1);
    CMat H = CMat::Zero(m + 1, m);
    V.col(0) = start_vector(n, opt.seed);
    int j0 = 0;
    std::vector<EigenPair> best;
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        rep.restarts = restart;
        for (int j = j0; j < m; ++j) {
            CVec w = V.col(j);
            lu.solve(w);
            CVec h;
            orthogonalize(V, j + 1, w, h);
            H.col(j).head(j + 1) = h;
            const double beta = w.norm();
            H(j + 1, j) = beta;
            if (beta < 1e-300) {
                // Invariant subspace: continue with a fresh orthogonal direction.
                CVec r = start_vector(n, opt.seed + 7 + j);
                CVec hh;
                orthogonalize(V, j + 1, r, hh);
                V.col(j + 1) = r / r.norm();
                H(j + 1, j) = 0.0;
            } else {
                V.col(j + 1) = w / beta;
            }
        }
        Eigen::ComplexEigenSolver<CMat> es(H.topRows(m), true);
        std::vector<int> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
        });
        // Candidate eigenpairs of A.
        std::vector<EigenPair> cand;
        bool all_ok = true;
        for (int q = 0; q < count && q < m; ++q) {
            const cplx theta = es.eigenvalues()[order[q]];
            EigenPair e;
            e.value = sigma + 1.0 / theta;
            CVec s = es.eigenvectors().col(order[q]);
            e.vector = V.leftCols(m) * s;
            e.vector /= e.vector.norm();
            e.residual = residual_of(A, e.vector, e.value);
            if (!(e.residual <= opt.tol)) all_ok = false;
            cand.push_back(std::move(e));
        }
        best = cand;
        if (all_ok) {
            rep.converged = true;
            break;
        }
        if (restart == opt.max_restarts) break;
        // Thick restart on the span of the wanted Ritz vectors, which is an
        // invariant subspace of the projected matrix.
        CMat S(m, keep);
        for (int q = 0; q < keep; ++q) S.col(q) = es.eigenvectors().col(order[q]);
        Eigen::HouseholderQR<CMat> qr(S);
        CMat Q = qr.householderQ() * CMat::Identity(m, keep);
        CMat Hm = H.topRows(m);
        CMat Tp = Q.adjoint() * Hm * Q;
        CVec last = H.row(m).transpose();
        CMat Vnew = V.leftCols(m) * Q;
        CVec vnext = V.col(m);
        V.setZero();
        H.setZero();
        V.leftCols(keep) = Vnew;
        V.col(keep) = vnext;
        H.topLeftCorner(keep, keep) = Tp;
        H.row(keep).head(keep) = (last.transpose() * Q);
        j0 = keep;
    }
    std::sort(best.begin(), best.end(), [&](const EigenPair& a, const EigenPair& b) { return nearer(a, b, shift); });
    rep.pairs = std::move(best);
    return rep;
}

}  // namespace

EigsReport eigs_near(const SpMat<double>& A, cplx shift, int count, const EigsOptions& opt)
{
    if (count < 1) throw std::invalid_argument("eigs_near: count must be >= 1");
    if (A.rows() <= 500) return dense_eigs(A, shift, count);
    return krylov_eigs(A, shift, count, opt);
}

EigsReport eigs_near(const SpMat<cplx>& A, cplx shift, int count, const EigsOptions& opt)
{
    if (count < 1) throw std::invalid_argument("eigs_near: count must be >= 1");
    if (A.rows() <= 500) return dense_eigs(A, shift, count);
    return krylov_eigs(A, shift, count, opt);
}

double lanczos_max(int n, const std::function<VecT<cplx>(const VecT<cplx>&)>& op,
                   const std::function<VecT<cplx>(const VecT<cplx>&)>& mass, int steps, double tol,
                   unsigned long long seed, int* steps_used)
{
    steps = std::min(steps, n);
    std::vector<CVec> Q;
    std::vector<CVec> MQ;
    CVec q = start_vector(n, seed);
    CVec Mq = mass(q);
    double nq = std::sqrt(std::abs(q.dot(Mq)));
    q /= nq;
    Mq /= nq;
    std::vector<double> alpha, beta;
    double prev = -1e300, theta = 0.0;
    int used = 0;
    for (int j = 0; j < steps; ++j) {
        Q.push_back(q);
        MQ.push_back(Mq);
        CVec w = op(q);
        const double a = std::real(Mq.dot(w));
        alpha.push_back(a);
        // Full reorthogonalization in the M inner product.
        for (int pass = 0; pass < 2; ++pass)
            for (size_t i = 0; i < Q.size(); ++i) w -= Q[i] * MQ[i].dot(w);
        CVec Mw = mass(w);
        const double b = std::sqrt(std::abs(w.dot(Mw)));
        used = j + 1;
        Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(used, used);
        for (int i = 0; i < used; ++i) {
            Tm(i, i) = alpha[i];
            if (i + 1 < used) Tm(i, i + 1) = Tm(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm, Eigen::ComputeEigenvectors);
        theta = es.eigenvalues()[used - 1];
        const double est = b * std::abs(es.eigenvectors()(used - 1, used - 1));
        if (j > 2 && (est <= tol * std::max(1.0, std::abs(theta)) || std::abs(theta - prev) <= 1e-14 * std::abs(theta)))
            break;
        prev = theta;
        if (b < 1e-300) break;
        beta.push_back(b);
        q = w / b;
        Mq = Mw / b;
    }
    if (steps_used) *steps_used = used;
    return theta;
}

}  // namespace latwave
