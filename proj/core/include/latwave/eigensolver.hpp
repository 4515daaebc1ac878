#pragma once

#include <functional>
#include <vector>

#include "latwave/banded.hpp"

namespace latwave {

struct EigenPair {
    cplx value;
    VecT<cplx> vector;  // unit 2-norm
    double residual = 0.0;  // ||A v - value v|| / ||v||
};

struct EigsOptions {
    int krylov_dim = 0;  // 0: chosen from count
    int max_restarts = 60;
    double tol = 1e-9;   // absolute residual target
    unsigned long long seed = 0x5eed1234ULL;
};

struct EigsReport {
    std::vector<EigenPair> pairs;
    cplx shift_used;
    bool shift_perturbed = false;
    bool converged = false;
    int restarts = 0;
};

// `count` eigenvalues of A nearest `shift`, ordered by distance then by
// imaginary part.  Dense QR for small matrices, shift-invert Krylov with
// thick Ritz-vector restarts otherwise.
EigsReport eigs_near(const SpMat<double>& A, cplx shift, int count, const EigsOptions& opt = {});
EigsReport eigs_near(const SpMat<cplx>& A, cplx shift, int count, const EigsOptions& opt = {});

// Largest eigenvalue of a self-adjoint operator with respect to the inner
// product <x, y>_M = x^H M y (M given as an operator).  Lanczos with full
// reorthogonalization; returns the largest Ritz value.
double lanczos_max(int n, const std::function<VecT<cplx>(const VecT<cplx>&)>& op,
                   const std::function<VecT<cplx>(const VecT<cplx>&)>& mass, int steps, double tol,
                   unsigned long long seed, int* steps_used = nullptr);

}  // namespace latwave
