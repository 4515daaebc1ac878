// End-to-end acceptance: runs `all` on the shipped configs and prints one
// line per criterion.  Exit code 0 iff every criterion passes.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latwave/config.hpp"
#include "latwave/io.hpp"
#include "latwave/pipeline.hpp"

using namespace latwave;
using nlohmann::json;

namespace {

struct Run {
    std::string name;
    json summary;
    json timing;
    std::string summary_bytes;
};

Run run_all(const std::string& cfg_path, const std::string& out_dir, const std::string& name)
{
    RunConfig cfg = load_config(cfg_path);
    cfg.out_dir = out_dir;
    std::filesystem::remove_all(out_dir);
    const CommandResult r = run_command(Command::All, cfg);
    return {name, r.summary, r.timing, read_text(out_dir + "/summary.json")};
}

bool check_pass(const Run& r, const std::string& check)
{
    const json& c = r.summary.at("checks");
    return c.contains(check) && c.at(check).value("pass", false);
}

std::string reason(const Run& r, const std::string& check)
{
    const json& c = r.summary.at("checks");
    if (!c.contains(check)) return r.name + ": not run";
    if (c.at(check).contains("error")) return r.name + ": " + c.at(check).at("error").get<std::string>();
    return r.name + ": check failed";
}

double seconds(const Run& r, const std::string& check)
{
    return r.timing.contains(check) ? r.timing.at(check).get<double>() : 0.0;
}

struct Criterion {
    int id;
    std::string title;
    std::string check;     // summary check that must pass in every run
    double budget = 0.0;   // seconds per run, 0 for none
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"latwave acceptance"};
    std::string configs, work;
    app.add_option("--configs", configs, "Directory with the shipped configs")->required()->check(CLI::ExistingDirectory);
    app.add_option("--work", work, "Scratch output directory")->required();
    CLI11_PARSE(app, argc, argv);

    const std::vector<Run> runs = {
        run_all(configs + "/fhn_corollary.cfg", work + "/fhn_a", "fhn-corollary"),
        run_all(configs + "/nagumo.cfg", work + "/nagumo_a", "nagumo"),
    };
    const std::vector<Run> repeats = {
        run_all(configs + "/fhn_corollary.cfg", work + "/fhn_b", "fhn-corollary"),
        run_all(configs + "/nagumo.cfg", work + "/nagumo_b", "nagumo"),
    };

    const std::vector<Criterion> criteria = {
        {1, "hypothesis checks", "hypotheses", 1.0},
        {2, "singular pulse", "singular_pulse", 120.0},
        {3, "convergence along eps = 0.4, 0.2, 0.1, 0.05", "convergence", 300.0},
        {4, "fixed point at eps = 0.1, delta = 0.1 and E0 bound", "fixed_point", 0.0},
        {5, "kernel, gap and strip scan at eps = 0.1", "spectrum", 300.0},
        {6, "essential spectrum", "essential_spectrum", 0.0},
        {7, "quasi-inverse uniformity", "quasi_inverse", 0.0},
        {8, "coercivity at lambda = i", "coercivity", 0.0},
        {9, "nonlinear stability at eps = 0.1", "stability", 180.0},
        {10, "symmetry controls at a = 1/2", "symmetry", 0.0},
    };

    bool all_ok = true;
    auto report = [&](int id, const std::string& title, bool ok, const std::string& detail) {
        std::printf("[%s] %2d %s%s%s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.empty() ? "" : "  -- ",
                    detail.c_str());
        all_ok = all_ok && ok;
    };

    for (const Criterion& c : criteria) {
        bool ok = true;
        std::string detail;
        for (const Run& r : runs) {
            std::string why;
            if (!check_pass(r, c.check)) why = reason(r, c.check);
            else if (c.budget > 0.0 && seconds(r, c.check) >= c.budget) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "%s: %.1f s over the %.0f s budget", r.name.c_str(),
                              seconds(r, c.check), c.budget);
                why = buf;
            }
            if (!why.empty()) {
                ok = false;
                detail += (detail.empty() ? "" : "; ") + why;
            }
        }
        report(c.id, c.title, ok, detail);
    }

    bool same = true;
    std::string detail;
    for (size_t i = 0; i < runs.size(); ++i)
        if (runs[i].summary_bytes != repeats[i].summary_bytes) {
            same = false;
            detail += (detail.empty() ? "" : "; ") + runs[i].name + ": summary.json differs between runs";
        }
    report(11, "determinism of summary.json", same, detail);

    // Same checks on the part of the FHN branch that exists.  Reported for
    // reference; not part of the verdict.
    const std::string extra = configs + "/fhn_attainable.cfg";
    if (std::filesystem::exists(extra)) {
        const Run s = run_all(extra, work + "/fhn_attainable", "fhn-attainable");
        for (const Criterion& c : criteria) {
            const bool ok = check_pass(s, c.check);
            std::printf("  supplementary, not counted: fhn_attainable.cfg [%s] %s%s%s\n", ok ? "PASS" : "FAIL",
                        c.check.c_str(), ok ? "" : "  -- ", ok ? "" : reason(s, c.check).c_str());
        }
    }

    std::printf("%s\n", all_ok ? "acceptance: all criteria pass" : "acceptance: some criteria fail");
    return all_ok ? 0 : 1;
}
