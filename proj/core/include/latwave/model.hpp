#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace latwave {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Reaction term G = (f, g) of one sublattice.  Nagumo has a single diffusing
// component, FHN adds one recovery variable.
struct Reaction {
    enum class Kind { Nagumo, FHN };

    Kind kind = Kind::Nagumo;
    double a = 0.1;
    double rho = 0.0;
    double gamma = 0.0;

    static Reaction nagumo(double a);
    static Reaction fhn(double a, double rho, double gamma);

    int n() const { return 1; }
    int k() const { return kind == Kind::FHN ? 1 : 0; }
    int dim() const { return n() + k(); }
    std::string name() const;
};

double cubic(double u, double a);
double cubic_du(double u, double a);

Vec eval_reaction(const Reaction& r, const Vec& U);
Mat jac_reaction(const Reaction& r, const Vec& U);

// Hot-loop variants.  J is row-major dim x dim.
void eval_reaction(const Reaction& r, const double* U, double* out);
void jac_reaction(const Reaction& r, const double* U, double* J);

struct ModelParams {
    double eps = 0.1;
    Vec diffusion;  // diagonal of D, length n
    Reaction odd;
    Reaction even;
    Vec rest_minus_odd, rest_plus_odd;
    Vec rest_minus_even, rest_plus_even;

    int n() const { return even.n(); }
    int k() const { return even.k(); }
    // Width of one parity block (u and w together).
    int block_dim() const { return n() + k(); }
    bool uniform_blocks() const { return odd.n() == even.n() && odd.k() == even.k(); }

    // d_j pattern of the LDE: eps^-2 on odd sites, 1 on even sites.
    double site_weight(long j) const { return (j % 2 != 0) ? 1.0 / (eps * eps) : 1.0; }

    // Throws std::invalid_argument on dimension or range violations.
    void validate() const;
};

ModelParams fhn_corollary_preset();
ModelParams nagumo_preset(double a = 0.1);

bool is_rest_state(const Reaction& r, const Vec& U, double tol = 1e-10);

bool check_h_alpha(const Reaction& r, const Vec& Um, const Vec& Up);

struct HBetaResult {
    bool applicable = false;
    bool holds = false;
    std::optional<double> Gamma;
    std::string note;
};

HBetaResult check_h_beta(const Reaction& r, const Vec& Um, const Vec& Up);

struct TripletReport {
    std::string parity;
    bool h_alpha = false;
    HBetaResult h_beta;
    bool hn2 = false;
};

struct AssumptionReport {
    bool hn1 = false;
    std::vector<std::string> hn1_failures;
    TripletReport odd, even;
    bool hn2 = false;
    bool gamma_window_applicable = false;
    bool gamma_window = false;
    double gamma_window_bound = 0.0;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

AssumptionReport check_assumptions(const ModelParams& p);

}  // namespace latwave
