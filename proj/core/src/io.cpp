#include "latwave/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace latwave {

namespace {

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_num(const std::string& s)
{
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw FormatError("bad number '" + s + "'");
    return x;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string join(const Vec& v)
{
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v[i]);
    return s;
}

Vec parse_vec(const std::string& s)
{
    if (s.empty()) return Vec();
    const auto parts = split(s, ';');
    Vec v(static_cast<Eigen::Index>(parts.size()));
    for (size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_num(parts[i]);
    return v;
}

std::string component_name(const std::string& block, int width, int q)
{
    return width == 1 ? block : block + "." + std::to_string(q);
}

}  // namespace

void write_profile_csv(std::ostream& os, const Profile& p)
{
    os << "# latwave profile\n";
    os << "# L=" << p.grid.L << "\n";
    os << "# m=" << p.grid.m << "\n";
    os << "# blocks=";
    for (size_t b = 0; b < p.blocks.size(); ++b) os << (b ? ";" : "") << p.blocks[b] << ":" << p.widths[b];
    os << "\n";
    os << "# clamp_minus=" << join(p.clamp_minus) << "\n";
    os << "# clamp_plus=" << join(p.clamp_plus) << "\n";
    os << "xi,block,component,value\n";
    for (long i = 0; i < p.nodes(); ++i) {
        const std::string xi = num(p.grid.xi(i));
        int c = 0;
        for (size_t b = 0; b < p.blocks.size(); ++b)
            for (int q = 0; q < p.widths[b]; ++q, ++c)
                os << xi << "," << p.blocks[b] << "," << q << "," << num(p.at(i, c)) << "\n";
    }
}

Profile read_profile_csv(std::istream& is)
{
    std::map<std::string, std::string> meta;
    std::string line;
    while (std::getline(is, line) && !line.empty() && line[0] == '#') {
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
    }
    for (const char* k : {"L", "m", "blocks", "clamp_minus", "clamp_plus"})
        if (!meta.count(k)) throw FormatError(std::string("profile CSV missing header '") + k + "'");
    Grid g{static_cast<int>(parse_num(meta["L"])), static_cast<int>(parse_num(meta["m"]))};
    std::vector<std::string> blocks;
    std::vector<int> widths;
    for (const auto& b : split(meta["blocks"], ';')) {
        const size_t colon = b.find(':');
        if (colon == std::string::npos) throw FormatError("bad block spec '" + b + "'");
        blocks.push_back(b.substr(0, colon));
        widths.push_back(static_cast<int>(parse_num(b.substr(colon + 1))));
    }
    Profile p = Profile::make(g, blocks, widths, parse_vec(meta["clamp_minus"]), parse_vec(meta["clamp_plus"]));
    if (line != "xi,block,component,value") throw FormatError("profile CSV column header mismatch");
    for (long i = 0; i < p.nodes(); ++i) {
        int c = 0;
        for (size_t b = 0; b < p.blocks.size(); ++b)
            for (int q = 0; q < p.widths[b]; ++q, ++c) {
                if (!std::getline(is, line)) throw FormatError("profile CSV truncated at node " + std::to_string(i));
                const auto f = split(line, ',');
                if (f.size() != 4) throw FormatError("profile CSV row has wrong width");
                if (f[1] != p.blocks[b] || parse_num(f[2]) != q || parse_num(f[0]) != g.xi(i))
                    throw FormatError("profile CSV rows out of order at node " + std::to_string(i));
                p.at(i, c) = parse_num(f[3]);
            }
    }
    return p;
}

void write_curves_csv(std::ostream& os, const EssentialCurves& c)
{
    os << "y,branch,re_lambda,im_lambda\n";
    for (size_t k = 0; k < c.y.size(); ++k)
        for (size_t b = 0; b < c.lambda.size(); ++b)
            os << num(c.y[k]) << "," << b << "," << num(c.lambda[b][k].real()) << "," << num(c.lambda[b][k].imag())
               << "\n";
}

EssentialCurves read_curves_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "y,branch,re_lambda,im_lambda")
        throw FormatError("curves CSV header mismatch");
    EssentialCurves c;
    c.max_re = -INFINITY;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 4) throw FormatError("curves CSV row has wrong width");
        const double y = parse_num(f[0]);
        const size_t b = static_cast<size_t>(parse_num(f[1]));
        const cplx z(parse_num(f[2]), parse_num(f[3]));
        if (b == 0) c.y.push_back(y);
        if (c.lambda.size() <= b) c.lambda.resize(b + 1);
        c.lambda[b].push_back(z);
        c.max_re = std::max(c.max_re, z.real());
    }
    for (const auto& br : c.lambda)
        if (br.size() != c.y.size()) throw FormatError("curves CSV branches have unequal length");
    return c;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int stride)
{
    if (stride < 1) throw std::invalid_argument("trajectory stride must be positive");
    os << "t,j,component,value\n";
    for (const auto& snap : traj) {
        const LatticeState& s = snap.state;
        const long sites = s.sites();
        const int n = sites > 0 ? static_cast<int>(s.u.size() / sites) : 0;
        const int k = sites > 0 ? static_cast<int>(s.w.size() / sites) : 0;
        for (long i = 0; i < sites; i += stride) {
            const long j = s.j_lo + i;
            for (int q = 0; q < n; ++q)
                os << num(snap.t) << "," << j << "," << component_name("u", n, q) << "," << num(s.u[i * n + q])
                   << "\n";
            for (int q = 0; q < k; ++q)
                os << num(snap.t) << "," << j << "," << component_name("w", k, q) << "," << num(s.w[i * k + q])
                   << "\n";
        }
    }
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "t,j,component,value") throw FormatError("trajectory CSV header mismatch");
    std::vector<TrajectoryRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 4) throw FormatError("trajectory CSV row has wrong width");
        rows.push_back({parse_num(f[0]), static_cast<long>(parse_num(f[1])), f[2], parse_num(f[3])});
    }
    return rows;
}

void write_text(const std::string& path, const std::string& text)
{
    const std::filesystem::path fp(path);
    if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

std::string read_text(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_json(const std::string& path, const nlohmann::json& j)
{
    write_text(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const std::string& path)
{
    return nlohmann::json::parse(read_text(path));
}

}  // namespace latwave
