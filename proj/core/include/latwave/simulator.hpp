#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "latwave/model.hpp"

namespace latwave {

struct FullWave;

// Nearest-neighbour lattice with period-1 or period-2 coefficients.  The LDE
// has period 2 (odd sites carry eps^-2 D and F_o); the limiting even lattice
// has period 1, coupling D/2 and neighbouring sites 2 apart in xi.
struct LatticeSystem {
    int period = 2;
    double spacing = 1.0;       // xi distance between neighbouring sites
    std::array<Vec, 2> coupling;  // [even, odd] diagonal coupling, length n
    std::array<Reaction, 2> reaction;
    std::array<Vec, 2> rest_minus, rest_plus;
    int n = 1, k = 0;

    static LatticeSystem lde(const ModelParams& p);
    static LatticeSystem even_limit(const ModelParams& p);

    int parity(long j) const { return period == 2 && (j % 2 != 0) ? 1 : 0; }
};

enum class Boundary { Clamped, Periodic };
enum class Scheme { RK4, IMEX_CN };

struct LatticeState {
    long j_lo = 0, j_hi = -1;  // inclusive site range
    Vec u;                     // sites * n
    Vec w;                     // sites * k
    double t = 0.0;
    Boundary bc = Boundary::Clamped;

    long sites() const { return j_hi - j_lo + 1; }
};

// All sites at their U^- rest state.
LatticeState make_state(const LatticeSystem& s, long j_lo, long j_hi, Boundary bc);

void rhs(const LatticeState& st, const LatticeSystem& s, Vec& du, Vec& dw);

// Largest dt accepted by the explicit RK4 scheme.
double rk4_dt_bound(const LatticeSystem& s);

// Stepper with the implicit diffusion system factored once.
class Integrator {
public:
    Integrator(const LatticeSystem& s, const LatticeState& shape, double dt, Scheme scheme);
    ~Integrator();
    Integrator(Integrator&&) noexcept;
    void step(LatticeState& st) const;
    double dt() const { return dt_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double dt_;
};

LatticeState step(const LatticeState& st, const LatticeSystem& s, double dt, Scheme scheme);

struct Snapshot {
    double t;
    LatticeState state;
};
using Trajectory = std::vector<Snapshot>;

Trajectory simulate(const LatticeSystem& s, LatticeState init, double dt, double T, double snapshot_every,
                    Scheme scheme);

// Site j takes the odd profiles at xi = j + c t if j is odd, the even ones
// otherwise.
LatticeState sample_wave_to_lattice(const FullWave& wave, double t, long j_lo, long j_hi);

struct SpeedFit {
    double speed = 0.0;
    double r2 = 0.0;
};

// Leftmost even-sublattice crossing of the first u component through `level`,
// fitted over the second half of the trajectory.  Speed has the sign of c in
// the ansatz u_j(t) = U(j + c t).
SpeedFit measure_speed(const Trajectory& traj, const LatticeSystem& s, double level);

struct Perturbation {
    enum class Shape { Gaussian, NodeDelta };
    Shape shape = Shape::Gaussian;
    double amplitude = 1e-2;
    double width = 5.0;  // sites, gaussian only
    unsigned long long seed = 12345;
};

struct StabilityOptions {
    long j_lo = -300, j_hi = 300;
    double dt = 0.01;
    double T = 200.0;
    double snapshot_every = 1.0;
    Scheme scheme = Scheme::IMEX_CN;
};

struct StabilityResult {
    std::vector<double> times, distances, thetas;
    double beta = 0.0;
    double theta_tilde = 0.0;
    double C = 0.0;
    double r2 = 0.0;
    bool fit_done = false;
    bool unstable = false;
};

// norm_p: p >= 1, or INFINITY for the sup norm.
StabilityResult stability_experiment(const FullWave& wave, const ModelParams& p, const Perturbation& pert,
                                     double norm_p, const StabilityOptions& opt);

// Deterministic standard normal samples (mt19937_64 + Box-Muller).
std::vector<double> normal_samples(unsigned long long seed, size_t count);

}  // namespace latwave
