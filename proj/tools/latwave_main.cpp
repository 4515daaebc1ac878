#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "latwave/config.hpp"
#include "latwave/pipeline.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Travelling waves of 2-periodic lattice FitzHugh-Nagumo systems"};
    app.require_subcommand(1, 1);

    std::string config_path, out_dir, preset;
    auto* cfg_opt = app.add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    app.add_option("--preset", preset, "Built-in parameter set")
        ->check(CLI::IsMember({"fhn-corollary", "nagumo"}))
        ->excludes(cfg_opt);

    const char* commands[][2] = {
        {"check", "Check the model hypotheses"},
        {"singular", "Compute the singular pulse and its adjoint"},
        {"solve", "Solve for the travelling wave at the configured eps"},
        {"continue", "Continue the wave along the eps ladder"},
        {"spectrum", "Kernel check and strip scan of the linearization"},
        {"essential", "Essential spectrum curves"},
        {"simulate", "Simulate the lattice from the sampled wave"},
        {"stability", "Perturbation decay experiment"},
        {"all", "Run every acceptance check"},
    };
    for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

    CLI11_PARSE(app, argc, argv);

    try {
        latwave::RunConfig cfg;
        if (!config_path.empty())
            cfg = latwave::load_config(config_path);
        else if (preset == "nagumo")
            cfg = latwave::default_config(latwave::Preset::Nagumo);
        else
            cfg = latwave::parse_config("");
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        for (const auto& w : cfg.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

        const auto cmd = latwave::parse_command(app.get_subcommands().front()->get_name());
        const latwave::CommandResult res = latwave::run_command(cmd, cfg);
        for (const auto& [name, check] : res.summary["checks"].items()) {
            const bool pass = check.value("pass", false);
            std::printf("%-20s %s", name.c_str(), pass ? "PASS" : "FAIL");
            if (check.contains("error")) std::printf("  (%s)", check["error"].get<std::string>().c_str());
            std::printf("\n");
        }
        std::printf("summary: %s/summary.json\n", cfg.out_dir.c_str());
        return res.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
