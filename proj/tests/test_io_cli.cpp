#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "latwave/config.hpp"
#include "latwave/io.hpp"
#include "latwave/pipeline.hpp"

using namespace latwave;

static std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("latwave_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

TEST_CASE("empty config is the FHN preset")
{
    const RunConfig c = parse_config("");
    const RunConfig d = default_config(Preset::FhnCorollary);
    CHECK(serialize(c) == serialize(d));
    CHECK(c.preset == Preset::FhnCorollary);
    CHECK(c.model.odd.rho == 0.05);
    CHECK(c.model.even.rho == 0.01);
    CHECK(c.eps_ladder == std::vector<double>{0.4, 0.2, 0.1, 0.05});
    CHECK(c.warnings.empty());
}

TEST_CASE("serialize is a fixed point of parse")
{
    for (Preset pr : {Preset::FhnCorollary, Preset::Nagumo}) {
        const std::string s = serialize(default_config(pr));
        CHECK(serialize(parse_config(s)) == s);
    }
    const std::string text = "[model]\npreset = nagumo\na_even = 0.3\na_odd = 0.3\n[grid]\nL = 25\n"
                             "[spectrum]\nlambda_star = 0.02  # tighter strip\n[sim]\nnorm_p = inf\n";
    const RunConfig c = parse_config(text);
    CHECK(c.model.even.a == 0.3);
    CHECK(c.grid.L == 25);
    CHECK(c.strip.lambda_star == 0.02);
    CHECK(std::isinf(c.norm_p));
    CHECK(serialize(parse_config(serialize(c))) == serialize(c));
}

TEST_CASE("config errors carry line numbers")
{
    auto line_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.line;
        }
        return -1;
    };
    CHECK(line_of("[model]\neps = 0.1\nbogus = 1\n") == 3);
    CHECK(line_of("[model]\neps = -0.1\n") == 2);
    CHECK(line_of("[grid]\nL = 10\nL = 12\n") == 3);
    CHECK(line_of("L = 10\n") == 1);
    CHECK(line_of("[model]\neps = 0.1\npreset = nagumo\n") == 3);
    CHECK(line_of("[sim]\nscheme = euler\n") == 2);
    CHECK(line_of("[sim]\nnorm_p = 0.5\n") == 2);
    CHECK(line_of("[nowhere]\n") == 1);
    try {
        parse_config("\n\n[grid]\nm = zero\n");
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("config line 4") != std::string::npos);
    }
}

TEST_CASE("gamma window violation is a warning, not an error")
{
    const RunConfig c = parse_config("[model]\ngamma_even = 10\n");
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("gamma_e") != std::string::npos);
}

TEST_CASE("profile CSV round trip")
{
    ModelParams p = fhn_corollary_preset();
    Profile u = make_full_profile(Grid{3, 4}, p);
    for (long i = 0; i < u.data.size(); ++i) u.data[i] = std::sin(0.37 * i) / 3.0;
    u.clamp_plus[1] = 0.125;
    std::stringstream ss;
    write_profile_csv(ss, u);
    const Profile v = read_profile_csv(ss);
    CHECK(v.grid == u.grid);
    CHECK(v.blocks == u.blocks);
    CHECK(v.widths == u.widths);
    CHECK(v.data == u.data);
    CHECK(v.clamp_plus == u.clamp_plus);

    std::stringstream again;
    write_profile_csv(again, u);
    std::string text = again.str();
    text.resize(text.size() - 30);
    std::stringstream truncated(text);
    CHECK_THROWS_AS(read_profile_csv(truncated), FormatError);
}

TEST_CASE("curves CSV round trip")
{
    const EssentialCurves e = essential_curves(fhn_corollary_preset(), 0.5, 0.1, Side::Minus, CurveOperator::Full, 11);
    std::stringstream ss;
    write_curves_csv(ss, e);
    const EssentialCurves f = read_curves_csv(ss);
    CHECK(f.y == e.y);
    REQUIRE(f.lambda.size() == e.lambda.size());
    for (size_t b = 0; b < e.lambda.size(); ++b) CHECK(f.lambda[b] == e.lambda[b]);
    CHECK(f.max_re == e.max_re);
}

TEST_CASE("trajectory CSV round trip")
{
    const ModelParams p = fhn_corollary_preset();
    const LatticeSystem s = LatticeSystem::lde(p);
    LatticeState st = make_state(s, -6, 6, Boundary::Clamped);
    st.u[6] = 0.3;
    const Trajectory traj = simulate(s, st, 0.01, 0.05, 0.02, Scheme::IMEX_CN);
    std::stringstream ss;
    write_trajectory_csv(ss, traj, 3);
    const std::vector<TrajectoryRow> rows = read_trajectory_csv(ss);
    // 5 sites of 13 with stride 3, two components each.
    CHECK(rows.size() == traj.size() * 5 * 2);
    CHECK(rows[0] == TrajectoryRow{0.0, -6, "u", 0.0});
    CHECK(rows[1].component == "w");
    CHECK(rows[5] == TrajectoryRow{0.0, 0, "w", 0.0});
    CHECK(rows[4] == TrajectoryRow{0.0, 0, "u", 0.3});
    CHECK_THROWS_AS(write_trajectory_csv(ss, traj, 0), std::invalid_argument);
}

TEST_CASE("commands")
{
    for (Command c : {Command::Check, Command::Singular, Command::Solve, Command::Continue, Command::Spectrum,
                      Command::Essential, Command::Simulate, Command::Stability, Command::All})
        CHECK(parse_command(to_string(c)) == c);
    CHECK_THROWS_AS(parse_command("solv"), std::invalid_argument);
}

TEST_CASE("check command writes its artifacts")
{
    RunConfig cfg = default_config(Preset::FhnCorollary);
    cfg.out_dir = scratch("check").string();
    const CommandResult r = run_command(Command::Check, cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.summary.at("command") == "check");
    CHECK(r.summary.at("pass") == true);
    CHECK(r.summary.at("checks").at("hypotheses").at("pass") == true);
    CHECK(read_json(cfg.out_dir + "/summary.json") == r.summary);
    CHECK(r.timing.contains("hypotheses"));
    CHECK(serialize(load_config(cfg.out_dir + "/config.cfg")) == serialize(cfg));

    SUBCASE("gamma outside the sufficient window fails the check")
    {
        RunConfig bad = parse_config("[model]\ngamma_even = 10\n");
        bad.out_dir = scratch("check_bad").string();
        const CommandResult rb = run_command(Command::Check, bad);
        CHECK(rb.exit_code != 0);
        CHECK(rb.summary.at("pass") == false);
    }
}
