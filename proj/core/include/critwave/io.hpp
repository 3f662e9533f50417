#pragma once

// Serialisation: radial fields and trajectories as CSV with JSON metadata,
// group parameters as flat JSON arrays, space-time fields as one CSV per
// time row plus a JSON manifest.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "critwave/conformal.hpp"
#include "critwave/discretization.hpp"
#include "critwave/evolution.hpp"
#include "critwave/lorentz.hpp"
#include "critwave/modulation.hpp"

namespace critwave::io {

using json = nlohmann::json;

/// Shortest text that reads back to the same double.
std::string format_double(double v);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

json to_json(const GroupParams& A);
GroupParams params_from_json(const json& j);

/// First line "# {metadata}", then "r,value" rows.
void write_field_csv(const std::filesystem::path& path, const RadialField& f);
RadialField read_field_csv(const std::filesystem::path& path);

/// Columns t, alpha_1..p, beta_1..p, gamma, E_plus, E_minus; `path` + ".json" holds the run data.
void write_mode_trajectory(const std::filesystem::path& path, const ModeSystemState& st);

/// Long-format snapshots "t,r,u,du" every `stride` snapshots, with a JSON manifest beside it.
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                      std::size_t stride = 1, const json& extra = json::object());

/// `dir`/manifest.json plus `dir`/row_NNNNN.csv with "x,u,ut".
void write_spacetime(const std::filesystem::path& dir, const SpaceTimeField& f);
SpaceTimeField read_spacetime(const std::filesystem::path& dir);

}  // namespace critwave::io
