#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "latwave/banded.hpp"
#include "latwave/grid.hpp"
#include "latwave/model.hpp"

namespace latwave {

struct SingularPulse;
struct FullWave;

enum class OpKind { Le, LeAdj, Lo, LepsLambda };
std::string to_string(OpKind k);

// Discretized linear operator over profile coordinates (node-major layout).
// The stored matrix is the operator at lambda = 0; the lambda shift is kept
// separately so that L_{eps,lambda} = L_{eps,0} + lambda I holds exactly.
struct OperatorMatrix {
    OpKind kind = OpKind::Le;
    double eps = 0.0;
    cplx lambda = 0.0;
    double c = 0.0;
    std::string base_id;
    Profile layout;  // block layout; data unused
    SpMat<double> A;

    int size() const { return static_cast<int>(A.rows()); }
    SpMat<double> real_matrix() const;  // requires Im lambda == 0
    SpMat<cplx> complex_matrix() const;
    VecT<cplx> apply(const VecT<cplx>& v) const;
    Vec apply(const Vec& v) const;  // requires Im lambda == 0
};

// Upwind direction used by every discretized d/dxi around a wave of speed c.
inline bool upwind_left(double c) { return c >= 0.0; }

// c v' - (1/2) J_D (S_2 - 2) v - DF_e(U_e) v on the even-limit layout.
// `left` overrides the upwind direction implied by the sign of c.
OperatorMatrix assemble_Le(const Profile& even, double c, const ModelParams& p, std::optional<bool> left = {});
// Exact discrete transpose of assemble_Le.
OperatorMatrix assemble_LeAdj(const Profile& even, double c, const ModelParams& p, std::optional<bool> left = {});
// c w' - D_2 g_o(u_o, w) on the odd recovery block (k components).
OperatorMatrix assemble_Lo(const Profile& odd_u, const Profile& odd_w, double c, const ModelParams& p);
// c v' - M^1_{1/eps^2} J_mix v - DF(U) v + lambda v on the full layout.
OperatorMatrix assemble_Leps(const Profile& full, double c, double eps, cplx lambda, const ModelParams& p,
                             std::optional<bool> left = {});

// Coordinate (row, col, value) text dump, one entry per line.
void dump_matrix(const OperatorMatrix& op, std::ostream& os);

struct QuasiInverseResult {
    double gamma = 0.0;
    Vec psi;
    double residual = 0.0;
};

// Solves L Psi = Theta + gamma U_0' with <(0, Phi_adj), Psi> = 0.
QuasiInverseResult quasi_inverse(const OperatorMatrix& L, const Vec& theta, const SingularPulse& sp);

struct CoercivityResult {
    double value = 0.0;
    bool in_spectrum = false;
    int lanczos_steps = 0;
};

// Smallest generalized singular value of M12 L_{eps,lambda} from the M12-weighted
// discrete H^1 into the M12-weighted discrete L^2.
CoercivityResult coercivity_diag(const ModelParams& p, const FullWave& wave, cplx lambda);

}  // namespace latwave
