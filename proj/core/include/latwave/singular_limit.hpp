#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "latwave/grid.hpp"
#include "latwave/model.hpp"

namespace latwave {

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
};

// Seed generation by simulating the limiting even lattice.
struct SeedOptions {
    double front_xi = 0.0;     // where the leading level crossing is placed
    double sim_time = 600.0;
    double dt = 0.05;
    int sites = 800;           // even-lattice sites in the simulation window
    double bump_width = 40.0;  // xi-width of the initial excitation (pulses)
};

struct NewtonFailure : std::runtime_error {
    std::vector<double> history;
    NewtonFailure(const std::string& what, std::vector<double> h) : std::runtime_error(what), history(std::move(h)) {}
};

// c U' - (1/2) D (S_2 - 2) u - F_e(U) on the even-limit layout (u, w).
Profile residual_even_limit(const Profile& even, double c, const ModelParams& p);

struct EvenSeed {
    Profile profile;
    double c = 0.0;         // simulator speed oracle
    double speed_r2 = 0.0;
};

EvenSeed generate_even_seed(const ModelParams& p, const Grid& g, const SeedOptions& opt);

struct EvenLimitSolution {
    Profile profile;
    double c0 = 0.0;
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> history;
    double seed_speed = 0.0;
    double seed_speed_r2 = 0.0;
};

// Bordered Newton on the even-limit MFDE with the integral phase condition
// <U - seed, seed'> = 0.  Without a seed one is generated by simulation.
EvenLimitSolution solve_even_limit(const ModelParams& p, const Grid& g, const Profile* seed, double seed_c,
                                   const NewtonOptions& opt, const SeedOptions& seed_opt);

// c0 w' = g_o((1/2) S_1 u_e, w) on the odd recovery block.  Returns a profile
// with the k recovery components; residual_out receives the sup residual.
Profile solve_odd_w(const Profile& even, double c0, const ModelParams& p, double* residual_out = nullptr);

// (1/2) S_1 u_e on the n diffusing components.
Profile odd_u_from_even(const Profile& even, const ModelParams& p);

struct AdjointKernel {
    Profile adjoint;
    double eigenvalue = 0.0;
    double residual = 0.0;  // ||Le^adj phi|| / ||phi||
};

AdjointKernel compute_adjoint_kernel(const Profile& even, double c0, const ModelParams& p);

struct SingularPulse {
    Profile even;
    Profile odd_w;
    Profile odd_u;
    double c0 = 0.0;
    Profile adjoint;

    double residual_even = 0.0;
    double residual_odd_w = 0.0;
    double adjoint_eigenvalue = 0.0;
    double adjoint_residual = 0.0;
    double pairing = 0.0;  // <U_e', Phi_adj>
    int iterations = 0;
    double seed_speed = 0.0;
    double seed_speed_r2 = 0.0;

    // Assembled 4-block profile U_0 = (u_o, w_o, u_e, w_e).
    Profile full() const;
    // (0, Phi_adj) on the full layout.
    Vec adjoint_full() const;
};

SingularPulse build_singular_pulse(const ModelParams& p, const Grid& g, const NewtonOptions& opt,
                                   const SeedOptions& seed_opt);

}  // namespace latwave
