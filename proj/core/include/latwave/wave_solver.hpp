#pragma once

#include <string>
#include <vector>

#include "latwave/singular_limit.hpp"

namespace latwave {

struct FullWave {
    Profile profile;
    double c = 0.0;
    double eps = 0.0;
    double residual_sup = 0.0;
    double boundary_residual = 0.0;
    int iterations = 0;
    std::vector<double> history;
};

// Residual of the four travelling-wave equations at eps = p.eps.
Profile residual_full(const Profile& U, double c, const ModelParams& p);

// Max deviation of the profile from its clamp values over the outermost 2m
// nodes at each end.
double boundary_deviation(const Profile& U);

// Bordered Newton with phase condition <U - seed, seed'> = 0.  The iteration
// starts from `start` when given, otherwise from the seed.
FullWave newton_solve(const ModelParams& p, const Profile& seed, double seed_c, const NewtonOptions& opt,
                      const Profile* start = nullptr, double start_c = 0.0);

struct ContinuationRow {
    double eps = 0.0;
    double phi_l2 = 0.0;
    double phi_h1 = 0.0;
    double scaled_deriv = 0.0;  // ||M^1_eps Phi'||_{L2}
    double dc = 0.0;            // |c_eps - c_0|
    double c = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

struct ContinuationResult {
    std::vector<FullWave> waves;
    std::vector<ContinuationRow> table;
    bool complete = false;
    std::string error;
    double failed_eps = 0.0;
};

ContinuationResult continue_in_eps(const ModelParams& p, const std::vector<double>& ladder, const SingularPulse& sp,
                                   const NewtonOptions& opt);

// Minus the full residual at (U_0, c_0): the E_0 term of the fixed-point map.
Vec residual_term_E0(const SingularPulse& sp, const ModelParams& p);

// N_e(Phi) = F_e(U_e0 + Phi) - DF_e(U_e0) Phi - F_e(U_e0) on the even layout.
Vec nonlinear_even(const Profile& even0, const Vec& phi_e, const ModelParams& p);

double c_delta(const Vec& phi_e, double delta, const SingularPulse& sp, const ModelParams& p);

struct FixedPointOptions {
    double tol = 1e-10;
    int max_iter = 400;
};

struct FixedPointResult {
    FullWave wave;
    std::vector<double> distances;
    double ratio = 0.0;  // geometric mean of successive distance ratios
    int iterations = 0;
};

FixedPointResult fixed_point_solve(const ModelParams& p, double delta, const SingularPulse& sp,
                                   const FixedPointOptions& opt);

}  // namespace latwave
