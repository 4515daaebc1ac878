#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latwave/linearization.hpp"

namespace latwave {

// Temporal eigenvalues: lambda with L + lambda singular, i.e. eigenvalues of
// -L for the operator L at lambda = 0.
struct CertifiedEigenvalue {
    cplx value;
    double residual = 0.0;  // ||(L + lambda) v|| / ||v||, matrix-free
    int image = 0;          // k != 0: image of the translation mode at ~ i k pi c
    double image_cosine = 0.0;
};

struct KernelCandidate {
    cplx value;
    double residual = 0.0;
    double cosine = 0.0;  // |<v, U'>| / (|v| |U'|)
    cplx second;          // next eigenvalue by modulus
};

// Two temporal eigenvalues nearest 0 with the eigenvector alignment against
// the wave derivative (same layout as the operator).
KernelCandidate kernel_check(const OperatorMatrix& L, const Vec& wave_derivative);

struct StripOptions {
    double lambda_star = 0.05;
    double height_factor = 1.5;  // strip |Im| <= height_factor * pi * |c|
    int count = 8;               // eigenvalues per shift
    int max_columns = 4;         // column splits when one disk cannot span R
    int max_restarts = 6;
    double min_step = 1e-2;      // smallest shift advance before a band is skipped
    double kernel_radius = 1e-4;
    double image_cosine = 0.99;  // eigenvector alignment that marks a translation image
};

struct ShiftDisk {
    cplx center;
    double radius = 0.0;
};

struct SpectrumReport {
    std::vector<CertifiedEigenvalue> eigenvalues;  // all found in R, sorted
    KernelCandidate kernel;
    double gap = 0.0;  // |second-nearest eigenvalue to 0|
    double re_min = 0.0, re_max = 0.0, im_max = 0.0;  // region R
    double abscissa = 0.0;  // upper bound on Re of the spectrum
    std::vector<ShiftDisk> disks;
    int uncertified = 0;  // bands of R no disk could certify
    bool pass = false;
    std::string message;

    nlohmann::json to_json() const;
};

// Upper bound on Re lambda for all temporal eigenvalues: largest eigenvalue
// of the symmetric part of -S L S^-1, S = eps on odd u, 1/sqrt(rho) on w.
double numerical_abscissa(const OperatorMatrix& L, const ModelParams& p);

// Covers R = {-lambda* <= Re <= abscissa, |Im| <= 1.5 pi |c|} with certified
// shift-invert disks.  The travelling-wave operator is invariant under
// lambda -> lambda + i pi c (modulation by exp(i pi xi) with odd blocks
// negated), so eigenvalues whose eigenvector is that image of U' are reported
// as translation images, not as separate eigenvalues.  Throws if adjacent
// disks disagree.
SpectrumReport strip_scan(const OperatorMatrix& L, const ModelParams& p, const Vec& wave_derivative,
                          const StripOptions& opt);

enum class CurveOperator { Full, EvenLimit, OddLimit };
enum class Side { Minus, Plus };

struct EssentialCurves {
    std::vector<double> y;
    // branch-major: lambda[b][k] at y[k]
    std::vector<std::vector<cplx>> lambda;
    double max_re = 0.0;
};

// Roots of det Delta(iy) for the constant-coefficient limit at U^side.
EssentialCurves essential_curves(const ModelParams& p, double c, double eps, Side side,
                                 CurveOperator op = CurveOperator::Full, int samples = 721);

// Max set distance between the curves at y + 2 pi and the curves at y
// shifted by -2 pi i c.
double periodicity_check(const EssentialCurves& curves, const ModelParams& p, double c, double eps, Side side,
                         CurveOperator op = CurveOperator::Full);

// |lambda_near(-2 pi i c) + 2 pi i c - lambda_near(0)| for the discretized
// operator: the point-spectrum analogue of periodicity.
double point_periodicity(const OperatorMatrix& L);

}  // namespace latwave
