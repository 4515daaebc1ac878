#include "latwave/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace latwave {

template <class T>
void bandwidths(const SpMat<T>& A, int& kl, int& ku)
{
    kl = ku = 0;
    for (int r = 0; r < A.outerSize(); ++r)
        for (typename SpMat<T>::InnerIterator it(A, r); it; ++it) {
            const int d = static_cast<int>(it.col()) - r;
            if (d > ku) ku = d;
            if (-d > kl) kl = -d;
        }
}

template <class T>
void BandLU<T>::factor(const SpMat<T>& A, T shift)
{
    if (A.rows() != A.cols()) throw std::invalid_argument("BandLU: matrix not square");
    n_ = static_cast<int>(A.rows());
    bandwidths(A, kl_, ku_);
    ldab_ = 2 * kl_ + ku_ + 1;
    ab_.assign(static_cast<size_t>(ldab_) * n_, T(0));
    ipiv_.assign(n_, 0);
    auto entry = [&](int i, int j) -> T& { return ab_[static_cast<size_t>(j) * ldab_ + kl_ + ku_ + i - j]; };
    for (int r = 0; r < A.outerSize(); ++r)
        for (typename SpMat<T>::InnerIterator it(A, r); it; ++it) entry(r, static_cast<int>(it.col())) += it.value();
    if (shift != T(0))
        for (int i = 0; i < n_; ++i) entry(i, i) += shift;
    lapack_int info;
    if constexpr (std::is_same_v<T, double>)
        info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_, ipiv_.data());
    else
        info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_, ipiv_.data());
    if (info > 0) throw SingularMatrixError("banded LU: zero pivot at row " + std::to_string(info));
    if (info < 0) throw std::runtime_error("banded LU: invalid argument " + std::to_string(-info));
}

template <class T>
void BandLU<T>::solve(MatT<T>& B, char trans) const
{
    if (B.rows() != n_) throw std::invalid_argument("BandLU::solve: size mismatch");
    if (B.cols() == 0) return;
    lapack_int info;
    if constexpr (std::is_same_v<T, double>) {
        const char t = trans == 'C' ? 'T' : trans;
        info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, t, n_, kl_, ku_, static_cast<lapack_int>(B.cols()), ab_.data(),
                              ldab_, ipiv_.data(), B.data(), n_);
    } else {
        info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, trans, n_, kl_, ku_, static_cast<lapack_int>(B.cols()),
                              ab_.data(), ldab_, ipiv_.data(), B.data(), n_);
    }
    if (info != 0) throw std::runtime_error("banded solve failed");
}

template <class T>
void BandLU<T>::solve(VecT<T>& b, char trans) const
{
    Eigen::Map<MatT<T>> B(b.data(), b.size(), 1);
    MatT<T> tmp = B;
    solve(tmp, trans);
    b = tmp.col(0);
}

template <class T>
void BorderedLU<T>::factor(const SpMat<T>& A, const MatT<T>& B, const MatT<T>& C, const MatT<T>& D)
{
    A_ = A;
    B_ = B;
    C_ = C;
    D_ = D;
    lu_.factor(A);
    XB_ = B;
    lu_.solve(XB_);
    MatT<T> S = D - C.transpose() * XB_;
    schur_.compute(S);
    // Reject a numerically singular Schur complement.
    const double scale = std::max(1.0, static_cast<double>(D.cwiseAbs().maxCoeff()) +
                                           static_cast<double>((C.transpose() * XB_).cwiseAbs().maxCoeff()));
    const MatT<T>& LU = schur_.matrixLU();
    for (int i = 0; i < LU.rows(); ++i)
        if (!(std::abs(LU(i, i)) > 1e-14 * scale))
            throw SingularMatrixError("bordered system singular (Schur complement pivot " + std::to_string(i) + ")");
}

template <class T>
void BorderedLU<T>::raw_solve(const VecT<T>& f, const VecT<T>& g, VecT<T>& x, VecT<T>& y) const
{
    VecT<T> z = f;
    lu_.solve(z);
    y = schur_.solve(VecT<T>(g - C_.transpose() * z));
    x = z - XB_ * y;
}

template <class T>
void BorderedLU<T>::solve(const VecT<T>& f, const VecT<T>& g, VecT<T>& x, VecT<T>& y, int refine) const
{
    raw_solve(f, g, x, y);
    const double fn = std::max({1e-300, static_cast<double>(f.cwiseAbs().maxCoeff()),
                                g.size() ? static_cast<double>(g.cwiseAbs().maxCoeff()) : 0.0});
    for (int it = 0; it <= refine; ++it) {
        VecT<T> rf = f - A_ * x - B_ * y;
        VecT<T> rg = g - C_.transpose() * x - D_ * y;
        const double r = std::max(static_cast<double>(rf.cwiseAbs().maxCoeff()),
                                  rg.size() ? static_cast<double>(rg.cwiseAbs().maxCoeff()) : 0.0);
        last_residual_ = r / fn;
        if (it == refine || last_residual_ < 1e-15) break;
        VecT<T> dx, dy;
        raw_solve(rf, rg, dx, dy);
        x += dx;
        y += dy;
    }
}

template void bandwidths<double>(const SpMat<double>&, int&, int&);
template void bandwidths<cplx>(const SpMat<cplx>&, int&, int&);
template class BandLU<double>;
template class BandLU<cplx>;
template class BorderedLU<double>;
template class BorderedLU<cplx>;

}  // namespace latwave
