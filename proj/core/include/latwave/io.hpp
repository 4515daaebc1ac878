#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latwave/grid.hpp"
#include "latwave/simulator.hpp"
#include "latwave/spectrum.hpp"

namespace latwave {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Profile CSV: '#' header lines carry the grid, block layout and clamps,
// then `xi,block,component,value` with one row per node and component.
void write_profile_csv(std::ostream& os, const Profile& p);
Profile read_profile_csv(std::istream& is);

// Curves CSV `y,branch,re_lambda,im_lambda`.
void write_curves_csv(std::ostream& os, const EssentialCurves& c);
EssentialCurves read_curves_csv(std::istream& is);

struct TrajectoryRow {
    double t = 0.0;
    long j = 0;
    std::string component;
    double value = 0.0;
    bool operator==(const TrajectoryRow& o) const
    {
        return t == o.t && j == o.j && component == o.component && value == o.value;
    }
};

// Trajectory CSV `t,j,component,value`, every `stride`-th site.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int stride);
std::vector<TrajectoryRow> read_trajectory_csv(std::istream& is);

// Files.  Writers create parent directories.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace latwave
