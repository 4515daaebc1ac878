#pragma once

#include <optional>
#include <string>
#include <vector>

#include "latwave/model.hpp"

namespace latwave {

// Uniform grid on [-L, L] with m nodes per unit, so shifts by 1 and 2 are m
// and 2m nodes.
struct Grid {
    int L = 30;
    int m = 20;

    double h() const { return 1.0 / m; }
    int nodes() const { return 2 * L * m + 1; }
    int zero_index() const { return L * m; }
    double xi(long i) const { return static_cast<double>(i - static_cast<long>(L) * m) / m; }
    bool operator==(const Grid& o) const { return L == o.L && m == o.m; }

    // Throws if L, m are not positive.
    void validate() const;
};

// Node-major samples of a tuple of fields.  Coordinate index of component c
// at node i is i * ncomp + c, which is also the layout of every operator.
struct Profile {
    Grid grid;
    std::vector<std::string> blocks;
    std::vector<int> widths;
    int ncomp = 0;
    Vec data;
    Vec clamp_minus;
    Vec clamp_plus;

    static Profile make(const Grid& g, std::vector<std::string> blocks, std::vector<int> widths,
                        const Vec& clamp_minus, const Vec& clamp_plus);

    int nodes() const { return grid.nodes(); }
    double& at(long i, int c) { return data[i * ncomp + c]; }
    double at(long i, int c) const { return data[i * ncomp + c]; }
    // Reads the clamp value outside [-L, L].
    double value(long i, int c) const
    {
        if (i < 0) return clamp_minus[c];
        if (i >= nodes()) return clamp_plus[c];
        return data[i * ncomp + c];
    }
    int block_offset(const std::string& name) const;  // -1 if absent
    Vec component(int c) const;
    void set_component(int c, const Vec& v);
};

// Full 4-block layout (u_o, w_o, u_e, w_e) and the even-limit layout (u, w).
Profile make_full_profile(const Grid& g, const ModelParams& p);
Profile make_even_profile(const Grid& g, const ModelParams& p);

// [S_i phi](xi) = phi(xi+i) + phi(xi-i), clamped.
Vec shift_sum(const Grid& g, const Vec& phi, int i, double clamp_minus, double clamp_plus);

// psi(xi+1) + psi(xi-1) - 2 phi(xi), psi clamped.
Vec delta_mix(const Grid& g, const Vec& phi, const Vec& psi, double psi_minus, double psi_plus);

// Second-order central in the interior, second-order one-sided at the ends.
Vec derivative(const Grid& g, const Vec& phi);

// Second-order upwind: left-biased when left is true.  Reads clamps.
Vec upwind_derivative(const Grid& g, const Vec& phi, double clamp_minus, double clamp_plus, bool left);
// Upwind derivative of every component of a profile.
Profile upwind_derivative(const Profile& p, bool left);
// Central derivative of every component.
Profile derivative(const Profile& p);

struct ScalingWeights {
    enum class Variant { M1, M2, M12 };
    Variant variant = Variant::M1;
    double eps = 1.0;
};

// Per-component factor of the scaling for a profile layout: eps on u_o (M1),
// on w_o (M2), or on both (M12); 1 elsewhere.
Vec component_scaling(const Profile& p, const ScalingWeights& w);
Vec apply_scaling(const Profile& layout, const ScalingWeights& w, const Vec& v);

// Trapezoid weights h (h/2 at the two end nodes) per node.
double quad_weight(const Grid& g, long i);

// Trapezoid L2 inner product of two coordinate vectors in the same layout.
double inner(const Grid& g, int ncomp, const Vec& a, const Vec& b);

struct Norms {
    double l2 = 0.0;
    double h1 = 0.0;
    double sup = 0.0;
};

Norms norms(const Profile& p, std::optional<ScalingWeights> w = std::nullopt);

// Cubic Lagrange interpolation through the four surrounding nodes, clamped
// outside [-L, L]; exact at nodes.
double interpolate(const Profile& p, int c, double xi);

}  // namespace latwave
