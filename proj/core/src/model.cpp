#include "latwave/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace latwave {

Reaction Reaction::nagumo(double a)
{
    Reaction r;
    r.kind = Kind::Nagumo;
    r.a = a;
    return r;
}

Reaction Reaction::fhn(double a, double rho, double gamma)
{
    Reaction r;
    r.kind = Kind::FHN;
    r.a = a;
    r.rho = rho;
    r.gamma = gamma;
    return r;
}

std::string Reaction::name() const
{
    return kind == Kind::FHN ? "fhn" : "nagumo";
}

double cubic(double u, double a) { return u * (1.0 - u) * (u - a); }

double cubic_du(double u, double a) { return -3.0 * u * u + 2.0 * (1.0 + a) * u - a; }

void eval_reaction(const Reaction& r, const double* U, double* out)
{
    if (r.kind == Reaction::Kind::Nagumo) {
        out[0] = cubic(U[0], r.a);
    } else {
        out[0] = cubic(U[0], r.a) - U[1];
        out[1] = r.rho * (U[0] - r.gamma * U[1]);
    }
}

void jac_reaction(const Reaction& r, const double* U, double* J)
{
    if (r.kind == Reaction::Kind::Nagumo) {
        J[0] = cubic_du(U[0], r.a);
    } else {
        J[0] = cubic_du(U[0], r.a);
        J[1] = -1.0;
        J[2] = r.rho;
        J[3] = -r.rho * r.gamma;
    }
}

static void check_dim(const Reaction& r, const Vec& U)
{
    if (U.size() != r.dim())
        throw std::invalid_argument("reaction " + r.name() + ": state has dimension " +
                                    std::to_string(U.size()) + ", expected " + std::to_string(r.dim()));
}

Vec eval_reaction(const Reaction& r, const Vec& U)
{
    check_dim(r, U);
    Vec out(r.dim());
    eval_reaction(r, U.data(), out.data());
    return out;
}

Mat jac_reaction(const Reaction& r, const Vec& U)
{
    check_dim(r, U);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> J(r.dim(), r.dim());
    jac_reaction(r, U.data(), J.data());
    return J;
}

static void check_reaction_ranges(const Reaction& r, const char* which)
{
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument(std::string(which) + " reaction: " + what);
    };
    if (!(r.a > 0.0 && r.a < 1.0)) fail("detuning a must lie in (0,1)");
    if (r.kind == Reaction::Kind::FHN) {
        if (!(r.rho > 0.0)) fail("rho must be positive");
        if (!(r.gamma > 0.0)) fail("gamma must be positive");
    }
}

void ModelParams::validate() const
{
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    check_reaction_ranges(odd, "odd");
    check_reaction_ranges(even, "even");
    if (odd.n() != even.n()) throw std::invalid_argument("odd and even reactions have different n");
    if (diffusion.size() != even.n()) throw std::invalid_argument("diffusion has wrong length");
    const Vec* rests[] = {&rest_minus_odd, &rest_plus_odd, &rest_minus_even, &rest_plus_even};
    for (int i = 0; i < 4; ++i) {
        const Reaction& r = i < 2 ? odd : even;
        if (rests[i]->size() != r.dim()) throw std::invalid_argument("rest state has wrong dimension");
    }
}

static Vec vec_of(std::initializer_list<double> v)
{
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

ModelParams fhn_corollary_preset()
{
    ModelParams p;
    p.eps = 0.1;
    p.diffusion = vec_of({1.0});
    p.odd = Reaction::fhn(0.1, 0.05, 1.0);
    p.even = Reaction::fhn(0.1, 0.01, 1.0);
    p.rest_minus_odd = p.rest_plus_odd = vec_of({0.0, 0.0});
    p.rest_minus_even = p.rest_plus_even = vec_of({0.0, 0.0});
    return p;
}

ModelParams nagumo_preset(double a)
{
    ModelParams p;
    p.eps = 0.1;
    p.diffusion = vec_of({1.0});
    p.odd = Reaction::nagumo(a);
    p.even = Reaction::nagumo(a);
    p.rest_minus_odd = p.rest_minus_even = vec_of({0.0});
    p.rest_plus_odd = p.rest_plus_even = vec_of({1.0});
    return p;
}

bool is_rest_state(const Reaction& r, const Vec& U, double tol)
{
    if (U.size() != r.dim()) return false;
    return eval_reaction(r, U).cwiseAbs().maxCoeff() <= tol;
}

// Symmetric part positive definite, threshold as in the design notes.
static bool sym_pos_def(const Mat& A)
{
    if (A.size() == 0) return true;
    Mat S = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 1e-12;
}

bool check_h_alpha(const Reaction& r, const Vec& Um, const Vec& Up)
{
    if (!is_rest_state(r, Um) || !is_rest_state(r, Up))
        throw std::invalid_argument("check_h_alpha: input is not a rest state");
    return sym_pos_def(-jac_reaction(r, Um)) && sym_pos_def(-jac_reaction(r, Up));
}

HBetaResult check_h_beta(const Reaction& r, const Vec& Um, const Vec& Up)
{
    HBetaResult res;
    if (r.k() == 0) {
        res.note = "no recovery block (k=0); condition not applicable";
        return res;
    }
    if (!is_rest_state(r, Um) || !is_rest_state(r, Up))
        throw std::invalid_argument("check_h_beta: input is not a rest state");
    res.applicable = true;
    const int n = r.n();
    bool blocks = true;
    for (const Vec* U : {&Um, &Up}) {
        Mat J = jac_reaction(r, *U);
        blocks = blocks && sym_pos_def(-J.topLeftCorner(n, n)) && sym_pos_def(-J.bottomRightCorner(r.k(), r.k()));
    }
    // For FHN the off-diagonal blocks are constant: G12 = -1, G21 = rho, so
    // G12 = -Gamma G21^T holds identically with Gamma = 1/rho.
    const double Gamma = 1.0 / r.rho;
    res.Gamma = Gamma;
    res.holds = blocks;
    res.note = blocks ? "structural identity G12 = -Gamma G21^T verified for built-in FHN"
                      : "diagonal blocks not negative definite at a rest state";
    return res;
}

static TripletReport triplet(const Reaction& r, const Vec& Um, const Vec& Up, const char* parity)
{
    TripletReport t;
    t.parity = parity;
    t.h_alpha = check_h_alpha(r, Um, Up);
    t.h_beta = check_h_beta(r, Um, Up);
    t.hn2 = t.h_alpha || t.h_beta.holds;
    return t;
}

AssumptionReport check_assumptions(const ModelParams& p)
{
    AssumptionReport rep;
    rep.hn1 = true;
    auto hn1_fail = [&](const std::string& s) {
        rep.hn1 = false;
        rep.hn1_failures.push_back(s);
    };
    if (p.diffusion.size() != p.even.n()) hn1_fail("diffusion length differs from n");
    for (Eigen::Index i = 0; i < p.diffusion.size(); ++i)
        if (!(p.diffusion[i] > 0.0)) hn1_fail("diffusion entry " + std::to_string(i) + " not strictly positive");
    if (p.odd.n() != p.even.n()) hn1_fail("odd and even n differ");

    auto rest_ok = [&](const Reaction& r, const Vec& U, const char* name) {
        if (!is_rest_state(r, U, 1e-12)) {
            hn1_fail(std::string(name) + " is not a zero of the reaction");
            return false;
        }
        return true;
    };
    bool rests = rest_ok(p.odd, p.rest_minus_odd, "U_o^-") & rest_ok(p.odd, p.rest_plus_odd, "U_o^+") &
                 rest_ok(p.even, p.rest_minus_even, "U_e^-") & rest_ok(p.even, p.rest_plus_even, "U_e^+");
    if (rests) {
        const int n = p.even.n();
        if ((p.rest_minus_odd.head(n) - p.rest_minus_even.head(n)).cwiseAbs().maxCoeff() > 0.0)
            hn1_fail("u-components of U_o^- and U_e^- differ");
        if ((p.rest_plus_odd.head(n) - p.rest_plus_even.head(n)).cwiseAbs().maxCoeff() > 0.0)
            hn1_fail("u-components of U_o^+ and U_e^+ differ");
        rep.odd = triplet(p.odd, p.rest_minus_odd, p.rest_plus_odd, "odd");
        rep.even = triplet(p.even, p.rest_minus_even, p.rest_plus_even, "even");
        rep.hn2 = rep.odd.hn2 && rep.even.hn2;
    }

    if (p.even.kind == Reaction::Kind::FHN) {
        rep.gamma_window_applicable = true;
        const double b = 4.0 / ((1.0 - p.even.a) * (1.0 - p.even.a));
        rep.gamma_window_bound = b;
        rep.gamma_window = p.even.gamma > 0.0 && p.even.gamma < b;
        if (!rep.gamma_window) {
            std::ostringstream os;
            os << "gamma_e = " << p.even.gamma << " outside the sufficient window (0, " << b << ")";
            rep.warnings.push_back(os.str());
        }
    }
    return rep;
}

static nlohmann::json triplet_json(const TripletReport& t)
{
    nlohmann::json j;
    j["h_alpha"] = t.h_alpha;
    j["h_beta"] = {{"applicable", t.h_beta.applicable}, {"holds", t.h_beta.holds}, {"note", t.h_beta.note}};
    j["h_beta"]["Gamma"] = t.h_beta.Gamma ? nlohmann::json(*t.h_beta.Gamma) : nlohmann::json(nullptr);
    j["hn2"] = t.hn2;
    return j;
}

nlohmann::json AssumptionReport::to_json() const
{
    nlohmann::json j;
    j["hn1"] = hn1;
    j["hn1_failures"] = hn1_failures;
    j["odd"] = triplet_json(odd);
    j["even"] = triplet_json(even);
    j["hn2"] = hn2;
    j["gamma_window"] = {{"applicable", gamma_window_applicable},
                         {"holds", gamma_window},
                         {"upper_bound", gamma_window_bound}};
    j["warnings"] = warnings;
    return j;
}

}  // namespace latwave
