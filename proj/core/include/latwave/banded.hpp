#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace latwave {

using cplx = std::complex<double>;

template <class T>
using SpMat = Eigen::SparseMatrix<T, Eigen::RowMajor>;
template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lower/upper bandwidth of a sparse matrix.
template <class T>
void bandwidths(const SpMat<T>& A, int& kl, int& ku);

// LU with partial pivoting of a banded matrix (LAPACK gbtrf/gbtrs).
template <class T>
class BandLU {
public:
    BandLU() = default;
    explicit BandLU(const SpMat<T>& A, T shift = T(0)) { factor(A, shift); }

    // Factors A + shift*I.  Throws SingularMatrixError on an exact zero pivot.
    void factor(const SpMat<T>& A, T shift = T(0));
    // In-place solve; trans is 'N', 'T' or 'C'.
    void solve(VecT<T>& b, char trans = 'N') const;
    void solve(MatT<T>& B, char trans = 'N') const;

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }
    bool empty() const { return n_ == 0; }

private:
    int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
    std::vector<T> ab_;
    std::vector<int> ipiv_;
};

// Solver for [[A, B], [C^T, D]] [x; y] = [f; g] with A sparse banded and a
// narrow border of p columns.  Block elimination on the banded LU plus
// iterative refinement against the exact bordered product, which keeps it
// accurate when A itself is close to singular (translation modes).
template <class T>
class BorderedLU {
public:
    BorderedLU() = default;
    BorderedLU(const SpMat<T>& A, const MatT<T>& B, const MatT<T>& C, const MatT<T>& D) { factor(A, B, C, D); }

    void factor(const SpMat<T>& A, const MatT<T>& B, const MatT<T>& C, const MatT<T>& D);
    void solve(const VecT<T>& f, const VecT<T>& g, VecT<T>& x, VecT<T>& y, int refine = 3) const;
    // Relative residual of the last solve.
    double last_residual() const { return last_residual_; }
    const BandLU<T>& band() const { return lu_; }

private:
    void raw_solve(const VecT<T>& f, const VecT<T>& g, VecT<T>& x, VecT<T>& y) const;

    SpMat<T> A_;
    MatT<T> B_, C_, D_, XB_;
    Eigen::PartialPivLU<MatT<T>> schur_;
    BandLU<T> lu_;
    mutable double last_residual_ = 0.0;
};

}  // namespace latwave
