#pragma once

#include "futurecone/cones.hpp"
#include "futurecone/engagement.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace futurecone {

struct PlayerSpec {
    DynamicsModel model{BoundedSpeedModel{1.0}};
    Vec position;
    std::optional<Vec> velocity;
    std::optional<double> heading;

    VehicleState initial_state() const;
};

/// Scenario document: two players, a cone window and the engagement knobs.
/// Parsing is strict — wrong types, missing fields, violated invariants and
/// unknown keys all fail with a field-path diagnostic.
struct ScenarioFile {
    int dimension = 2;
    PlayerSpec pursuer; // "x", the interceptor
    PlayerSpec evader;  // "y", the target
    double t_start = 0.5;
    double t_end = 5.0;
    int n_leaves = 10;
    double dt = 0.01;
    double t_max = 5.0;
    double capture_radius = 0.01;
    std::optional<double> arena_radius;
    uint64_t seed = 1;

    static ScenarioFile parse(const std::string& text);
    static ScenarioFile load(const std::string& path);
    nlohmann::json to_json() const;

    EngagementConfig engagement_config() const;
    FutureCone player_cone(bool pursuer_side, const ConeOptions& opts) const;
};

/// 17-significant-digit float for bit-stable CSV output.
std::string format_g17(double v);

/// Leaves as rows time,point_index,px,py[,pz]; ball leaves are written as a
/// dense boundary ring so per-time max radius equals the analytic radius.
void write_cone_csv(std::ostream& os, const FutureCone& cone);

/// Rows time,xp_x,xp_y[,xp_z],xe_x,xe_y[,xe_z],separation.
void write_trajectory_csv(std::ostream& os, const EngagementResult& result);

/// Static 2-D engagement picture: both trajectories, start markers, capture
/// point when one exists.
void write_engagement_svg(std::ostream& os, const EngagementResult& result);

} // namespace futurecone
