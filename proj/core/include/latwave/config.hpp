#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "latwave/grid.hpp"
#include "latwave/model.hpp"
#include "latwave/simulator.hpp"
#include "latwave/singular_limit.hpp"
#include "latwave/spectrum.hpp"
#include "latwave/wave_solver.hpp"

namespace latwave {

enum class Preset { FhnCorollary, Nagumo };

struct RunConfig {
    // [model]
    Preset preset = Preset::FhnCorollary;
    ModelParams model;
    std::vector<double> eps_ladder;

    // [grid]
    Grid grid;
    double front_xi = 0.0;

    // [solver]
    NewtonOptions newton;
    double delta = 0.1;
    FixedPointOptions fixed_point;
    SeedOptions seed;
    int qi_samples = 20;
    unsigned long long qi_seed = 2024;

    // [spectrum]
    StripOptions strip;
    int curve_samples = 721;

    // [sim]
    StabilityOptions sim;
    Perturbation perturbation;
    double norm_p = 2.0;
    int stride = 10;  // site decimation of trajectory CSVs

    // [output]
    std::string out_dir = "out";
    bool write_profiles = true;
    bool write_trajectory = true;

    std::vector<std::string> warnings;
};

struct ConfigError : std::runtime_error {
    int line = 0;
    ConfigError(int line_no, const std::string& msg);
};

RunConfig default_config(Preset preset = Preset::FhnCorollary);

// Sectioned "key = value" text, '#' comments.  A [model] preset key must come
// first in its section; it resets every default to that preset.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical text; parse_config(serialize(c)) reproduces c.
std::string serialize(const RunConfig& c);

std::string to_string(Preset p);

}  // namespace latwave
