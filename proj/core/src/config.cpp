#include "latwave/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace latwave {

ConfigError::ConfigError(int line_no, const std::string& msg)
    : std::runtime_error("config line " + std::to_string(line_no) + ": " + msg), line(line_no)
{
}

std::string to_string(Preset p)
{
    return p == Preset::Nagumo ? "nagumo" : "fhn-corollary";
}

RunConfig default_config(Preset preset)
{
    RunConfig c;
    c.preset = preset;
    c.eps_ladder = {0.4, 0.2, 0.1, 0.05};
    if (preset == Preset::Nagumo) {
        c.model = nagumo_preset(0.1);
        c.grid = Grid{40, 20};
        c.front_xi = 0.0;
        c.seed.sites = 400;
        c.seed.sim_time = 300.0;
    } else {
        c.model = fhn_corollary_preset();
        c.grid = Grid{170, 20};
        c.front_xi = -20.0;
    }
    c.seed.front_xi = c.front_xi;
    return c;
}

namespace {

std::string trim(const std::string& s)
{
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& v)
{
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

std::vector<double> to_std(const Vec& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Vec to_vec(const std::vector<double>& v)
{
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

// Raw model fields; reactions and rest states are assembled after parsing so
// keys may come in any order.
struct ModelDraft {
    Reaction::Kind odd_kind, even_kind;
    double a_odd, rho_odd, gamma_odd, a_even, rho_even, gamma_even;
    std::vector<double> diffusion;
    std::vector<double> rest[4];  // minus_odd, plus_odd, minus_even, plus_even
    bool rest_set[4] = {false, false, false, false};

    explicit ModelDraft(const ModelParams& p)
        : odd_kind(p.odd.kind), even_kind(p.even.kind), a_odd(p.odd.a), rho_odd(p.odd.rho),
          gamma_odd(p.odd.gamma), a_even(p.even.a), rho_even(p.even.rho), gamma_even(p.even.gamma),
          diffusion(to_std(p.diffusion))
    {
        rest[0] = to_std(p.rest_minus_odd);
        rest[1] = to_std(p.rest_plus_odd);
        rest[2] = to_std(p.rest_minus_even);
        rest[3] = to_std(p.rest_plus_even);
    }
};

Reaction make_reaction(Reaction::Kind k, double a, double rho, double gamma)
{
    return k == Reaction::Kind::FHN ? Reaction::fhn(a, rho, gamma) : Reaction::nagumo(a);
}

std::vector<double> default_rest(Reaction::Kind k, bool plus)
{
    if (k == Reaction::Kind::FHN) return {0.0, 0.0};
    return {plus ? 1.0 : 0.0};
}

struct Parser {
    int line = 0;

    double number(const std::string& v) const
    {
        if (v == "inf") return INFINITY;
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (v.empty() || *end != '\0' || std::isnan(x)) throw ConfigError(line, "expected a number, got '" + v + "'");
        return x;
    }
    double finite(const std::string& v) const
    {
        const double x = number(v);
        if (!std::isfinite(x)) throw ConfigError(line, "expected a finite number, got '" + v + "'");
        return x;
    }
    double positive(const std::string& v) const
    {
        const double x = finite(v);
        if (!(x > 0.0)) throw ConfigError(line, "expected a positive number, got '" + v + "'");
        return x;
    }
    long integer(const std::string& v) const
    {
        char* end = nullptr;
        const long x = std::strtol(v.c_str(), &end, 10);
        if (v.empty() || *end != '\0') throw ConfigError(line, "expected an integer, got '" + v + "'");
        return x;
    }
    int count(const std::string& v) const
    {
        const long x = integer(v);
        if (x < 1 || x > 1000000000L) throw ConfigError(line, "expected a positive integer, got '" + v + "'");
        return static_cast<int>(x);
    }
    unsigned long long seed(const std::string& v) const
    {
        char* end = nullptr;
        const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
        if (v.empty() || v[0] == '-' || *end != '\0') throw ConfigError(line, "expected a seed, got '" + v + "'");
        return x;
    }
    bool boolean(const std::string& v) const
    {
        if (v == "true") return true;
        if (v == "false") return false;
        throw ConfigError(line, "expected true or false, got '" + v + "'");
    }
    std::vector<double> list(const std::string& v) const
    {
        std::vector<double> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(finite(trim(item)));
        if (out.empty()) throw ConfigError(line, "expected a comma-separated list");
        return out;
    }
    Reaction::Kind kind(const std::string& v) const
    {
        if (v == "nagumo") return Reaction::Kind::Nagumo;
        if (v == "fhn") return Reaction::Kind::FHN;
        throw ConfigError(line, "unknown reaction kind '" + v + "'");
    }
};

}  // namespace

RunConfig parse_config(const std::string& text)
{
    RunConfig c = default_config();
    ModelDraft md(c.model);
    Parser P;
    std::string section;
    int model_line = 0;
    bool model_keys_seen = false;

    using Setter = std::function<void(const std::string&)>;
    std::map<std::string, std::map<std::string, Setter>> keys;
    auto& m = keys["model"];
    m["preset"] = [&](const std::string& v) {
        if (model_keys_seen) throw ConfigError(P.line, "preset must be the first key of [model]");
        if (v == "fhn-corollary")
            c = default_config(Preset::FhnCorollary);
        else if (v == "nagumo")
            c = default_config(Preset::Nagumo);
        else
            throw ConfigError(P.line, "unknown preset '" + v + "'");
        md = ModelDraft(c.model);
    };
    m["kind_odd"] = [&](const std::string& v) { md.odd_kind = P.kind(v); };
    m["kind_even"] = [&](const std::string& v) { md.even_kind = P.kind(v); };
    m["a_odd"] = [&](const std::string& v) { md.a_odd = P.finite(v); };
    m["rho_odd"] = [&](const std::string& v) { md.rho_odd = P.finite(v); };
    m["gamma_odd"] = [&](const std::string& v) { md.gamma_odd = P.finite(v); };
    m["a_even"] = [&](const std::string& v) { md.a_even = P.finite(v); };
    m["rho_even"] = [&](const std::string& v) { md.rho_even = P.finite(v); };
    m["gamma_even"] = [&](const std::string& v) { md.gamma_even = P.finite(v); };
    m["diffusion"] = [&](const std::string& v) { md.diffusion = P.list(v); };
    m["eps"] = [&](const std::string& v) {
        const double e = P.finite(v);
        if (!(e > 0.0)) throw ConfigError(P.line, "eps must be positive");
        c.model.eps = e;
    };
    m["eps_ladder"] = [&](const std::string& v) {
        c.eps_ladder = P.list(v);
        for (double e : c.eps_ladder)
            if (!(e > 0.0)) throw ConfigError(P.line, "eps_ladder entries must be positive");
    };
    const char* rest_names[4] = {"rest_minus_odd", "rest_plus_odd", "rest_minus_even", "rest_plus_even"};
    for (int i = 0; i < 4; ++i)
        m[rest_names[i]] = [&, i](const std::string& v) {
            md.rest[i] = P.list(v);
            md.rest_set[i] = true;
        };

    auto& g = keys["grid"];
    g["L"] = [&](const std::string& v) { c.grid.L = P.count(v); };
    g["m"] = [&](const std::string& v) { c.grid.m = P.count(v); };
    g["front_xi"] = [&](const std::string& v) { c.front_xi = P.finite(v); };

    auto& s = keys["solver"];
    s["tol"] = [&](const std::string& v) { c.newton.tol = P.positive(v); };
    s["max_iter"] = [&](const std::string& v) { c.newton.max_iter = P.count(v); };
    s["delta"] = [&](const std::string& v) { c.delta = P.positive(v); };
    s["fp_tol"] = [&](const std::string& v) { c.fixed_point.tol = P.positive(v); };
    s["fp_max_iter"] = [&](const std::string& v) { c.fixed_point.max_iter = P.count(v); };
    s["seed_time"] = [&](const std::string& v) { c.seed.sim_time = P.positive(v); };
    s["seed_dt"] = [&](const std::string& v) { c.seed.dt = P.positive(v); };
    s["seed_sites"] = [&](const std::string& v) { c.seed.sites = P.count(v); };
    s["seed_bump_width"] = [&](const std::string& v) { c.seed.bump_width = P.positive(v); };
    s["qi_samples"] = [&](const std::string& v) { c.qi_samples = P.count(v); };
    s["qi_seed"] = [&](const std::string& v) { c.qi_seed = P.seed(v); };

    auto& sp = keys["spectrum"];
    sp["lambda_star"] = [&](const std::string& v) { c.strip.lambda_star = P.positive(v); };
    sp["height_factor"] = [&](const std::string& v) { c.strip.height_factor = P.positive(v); };
    sp["count"] = [&](const std::string& v) { c.strip.count = P.count(v); };
    sp["max_restarts"] = [&](const std::string& v) { c.strip.max_restarts = P.count(v); };
    sp["max_columns"] = [&](const std::string& v) { c.strip.max_columns = P.count(v); };
    sp["min_step"] = [&](const std::string& v) { c.strip.min_step = P.positive(v); };
    sp["kernel_radius"] = [&](const std::string& v) { c.strip.kernel_radius = P.positive(v); };
    sp["curve_samples"] = [&](const std::string& v) {
        c.curve_samples = P.count(v);
        if (c.curve_samples < 2) throw ConfigError(P.line, "curve_samples must be at least 2");
    };

    auto& sm = keys["sim"];
    sm["j_lo"] = [&](const std::string& v) { c.sim.j_lo = P.integer(v); };
    sm["j_hi"] = [&](const std::string& v) { c.sim.j_hi = P.integer(v); };
    sm["dt"] = [&](const std::string& v) { c.sim.dt = P.positive(v); };
    sm["T"] = [&](const std::string& v) { c.sim.T = P.positive(v); };
    sm["snapshot_every"] = [&](const std::string& v) { c.sim.snapshot_every = P.positive(v); };
    sm["scheme"] = [&](const std::string& v) {
        if (v == "imex-cn")
            c.sim.scheme = Scheme::IMEX_CN;
        else if (v == "rk4")
            c.sim.scheme = Scheme::RK4;
        else
            throw ConfigError(P.line, "unknown scheme '" + v + "'");
    };
    sm["perturbation"] = [&](const std::string& v) {
        if (v == "gaussian")
            c.perturbation.shape = Perturbation::Shape::Gaussian;
        else if (v == "node-delta")
            c.perturbation.shape = Perturbation::Shape::NodeDelta;
        else
            throw ConfigError(P.line, "unknown perturbation '" + v + "'");
    };
    sm["amplitude"] = [&](const std::string& v) { c.perturbation.amplitude = P.finite(v); };
    sm["width"] = [&](const std::string& v) { c.perturbation.width = P.positive(v); };
    sm["seed"] = [&](const std::string& v) { c.perturbation.seed = P.seed(v); };
    sm["norm_p"] = [&](const std::string& v) {
        const double x = P.number(v);
        if (!(x >= 1.0)) throw ConfigError(P.line, "norm_p must be >= 1 or inf");
        c.norm_p = x;
    };
    sm["stride"] = [&](const std::string& v) { c.stride = P.count(v); };

    auto& o = keys["output"];
    o["dir"] = [&](const std::string& v) {
        if (v.empty()) throw ConfigError(P.line, "output dir must not be empty");
        c.out_dir = v;
    };
    o["profiles"] = [&](const std::string& v) { c.write_profiles = P.boolean(v); };
    o["trajectory"] = [&](const std::string& v) { c.write_trajectory = P.boolean(v); };

    std::map<std::string, std::map<std::string, int>> seen;
    std::stringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++P.line;
        const size_t hash = raw.find('#');
        const std::string ln = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (ln.empty()) continue;
        if (ln.front() == '[') {
            if (ln.back() != ']') throw ConfigError(P.line, "malformed section header");
            section = trim(ln.substr(1, ln.size() - 2));
            if (!keys.count(section)) throw ConfigError(P.line, "unknown section [" + section + "]");
            continue;
        }
        const size_t eq = ln.find('=');
        if (eq == std::string::npos) throw ConfigError(P.line, "expected key = value");
        const std::string key = trim(ln.substr(0, eq)), val = trim(ln.substr(eq + 1));
        if (section.empty()) throw ConfigError(P.line, "key '" + key + "' outside any section");
        auto it = keys[section].find(key);
        if (it == keys[section].end()) throw ConfigError(P.line, "unknown key '" + key + "' in [" + section + "]");
        if (seen[section].count(key)) throw ConfigError(P.line, "duplicate key '" + key + "'");
        seen[section][key] = P.line;
        it->second(val);
        if (section == "model") {
            model_line = P.line;
            if (key != "preset") model_keys_seen = true;
        }
    }

    // Assemble the model.
    const int line = model_line;
    c.model.odd = make_reaction(md.odd_kind, md.a_odd, md.rho_odd, md.gamma_odd);
    c.model.even = make_reaction(md.even_kind, md.a_even, md.rho_even, md.gamma_even);
    c.model.diffusion = to_vec(md.diffusion);
    Vec* rests[4] = {&c.model.rest_minus_odd, &c.model.rest_plus_odd, &c.model.rest_minus_even,
                     &c.model.rest_plus_even};
    for (int i = 0; i < 4; ++i) {
        const Reaction::Kind k = i < 2 ? md.odd_kind : md.even_kind;
        const bool plus = i % 2 == 1;
        const bool fits = static_cast<int>(md.rest[i].size()) == (k == Reaction::Kind::FHN ? 2 : 1);
        *rests[i] = to_vec(md.rest_set[i] || fits ? md.rest[i] : default_rest(k, plus));
    }
    try {
        c.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(line, e.what());
    }
    const AssumptionReport rep = check_assumptions(c.model);
    if (!rep.hn1) {
        std::string why;
        for (const auto& f : rep.hn1_failures) why += (why.empty() ? "" : "; ") + f;
        throw ConfigError(line, "(HN1) fails: " + why);
    }
    c.warnings = rep.warnings;
    try {
        c.grid.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(seen["grid"].count("L") ? seen["grid"]["L"] : 0, e.what());
    }
    if (c.sim.j_hi <= c.sim.j_lo) throw ConfigError(seen["sim"].count("j_hi") ? seen["sim"]["j_hi"] : 0, "j_hi must exceed j_lo");
    c.seed.front_xi = c.front_xi;
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const RunConfig& c)
{
    std::ostringstream os;
    auto kind = [](const Reaction& r) { return r.kind == Reaction::Kind::FHN ? "fhn" : "nagumo"; };
    const ModelParams& p = c.model;
    os << "[model]\n";
    os << "preset = " << to_string(c.preset) << "\n";
    os << "kind_odd = " << kind(p.odd) << "\n";
    os << "kind_even = " << kind(p.even) << "\n";
    os << "a_odd = " << fmt(p.odd.a) << "\n";
    os << "rho_odd = " << fmt(p.odd.rho) << "\n";
    os << "gamma_odd = " << fmt(p.odd.gamma) << "\n";
    os << "a_even = " << fmt(p.even.a) << "\n";
    os << "rho_even = " << fmt(p.even.rho) << "\n";
    os << "gamma_even = " << fmt(p.even.gamma) << "\n";
    os << "diffusion = " << fmt_list(to_std(p.diffusion)) << "\n";
    os << "eps = " << fmt(p.eps) << "\n";
    os << "eps_ladder = " << fmt_list(c.eps_ladder) << "\n";
    os << "rest_minus_odd = " << fmt_list(to_std(p.rest_minus_odd)) << "\n";
    os << "rest_plus_odd = " << fmt_list(to_std(p.rest_plus_odd)) << "\n";
    os << "rest_minus_even = " << fmt_list(to_std(p.rest_minus_even)) << "\n";
    os << "rest_plus_even = " << fmt_list(to_std(p.rest_plus_even)) << "\n";
    os << "\n[grid]\n";
    os << "L = " << c.grid.L << "\n";
    os << "m = " << c.grid.m << "\n";
    os << "front_xi = " << fmt(c.front_xi) << "\n";
    os << "\n[solver]\n";
    os << "tol = " << fmt(c.newton.tol) << "\n";
    os << "max_iter = " << c.newton.max_iter << "\n";
    os << "delta = " << fmt(c.delta) << "\n";
    os << "fp_tol = " << fmt(c.fixed_point.tol) << "\n";
    os << "fp_max_iter = " << c.fixed_point.max_iter << "\n";
    os << "seed_time = " << fmt(c.seed.sim_time) << "\n";
    os << "seed_dt = " << fmt(c.seed.dt) << "\n";
    os << "seed_sites = " << c.seed.sites << "\n";
    os << "seed_bump_width = " << fmt(c.seed.bump_width) << "\n";
    os << "qi_samples = " << c.qi_samples << "\n";
    os << "qi_seed = " << c.qi_seed << "\n";
    os << "\n[spectrum]\n";
    os << "lambda_star = " << fmt(c.strip.lambda_star) << "\n";
    os << "height_factor = " << fmt(c.strip.height_factor) << "\n";
    os << "count = " << c.strip.count << "\n";
    os << "max_restarts = " << c.strip.max_restarts << "\n";
    os << "max_columns = " << c.strip.max_columns << "\n";
    os << "min_step = " << fmt(c.strip.min_step) << "\n";
    os << "kernel_radius = " << fmt(c.strip.kernel_radius) << "\n";
    os << "curve_samples = " << c.curve_samples << "\n";
    os << "\n[sim]\n";
    os << "j_lo = " << c.sim.j_lo << "\n";
    os << "j_hi = " << c.sim.j_hi << "\n";
    os << "dt = " << fmt(c.sim.dt) << "\n";
    os << "T = " << fmt(c.sim.T) << "\n";
    os << "snapshot_every = " << fmt(c.sim.snapshot_every) << "\n";
    os << "scheme = " << (c.sim.scheme == Scheme::RK4 ? "rk4" : "imex-cn") << "\n";
    os << "perturbation = " << (c.perturbation.shape == Perturbation::Shape::NodeDelta ? "node-delta" : "gaussian")
       << "\n";
    os << "amplitude = " << fmt(c.perturbation.amplitude) << "\n";
    os << "width = " << fmt(c.perturbation.width) << "\n";
    os << "seed = " << c.perturbation.seed << "\n";
    os << "norm_p = " << fmt(c.norm_p) << "\n";
    os << "stride = " << c.stride << "\n";
    os << "\n[output]\n";
    os << "dir = " << c.out_dir << "\n";
    os << "profiles = " << (c.write_profiles ? "true" : "false") << "\n";
    os << "trajectory = " << (c.write_trajectory ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace latwave
