#pragma once

#include "futurecone/dynamics.hpp"
#include "futurecone/strategies.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace futurecone {

struct EngagementConfig {
    double dt = 0.01;
    double t_max = 5.0;
    /// Numerical capture radius: capture when separation <= this value.
    double capture_radius = 0.01;
    /// Engagement volume bound; the evader leaving it counts as Escape.
    std::optional<double> arena_radius;
    /// Planner grid for the plan/escape policies; horizon_end <= 0 means
    /// "use t_max".
    PlannerSettings planner{0.0, 20, 1e-9, {LeafMethod::Analytic, true, 256, 2, false}};

    void validate() const;
};

enum class Outcome { Intercept, Escape };

struct EngagementResult {
    Outcome outcome = Outcome::Escape;
    std::optional<double> intercept_time;
    std::vector<std::pair<double, Vec>> trajectory_x; // pursuer
    std::vector<std::pair<double, Vec>> trajectory_y; // evader
    double min_separation = 0.0;
    double min_separation_time = 0.0;
};

struct Agent {
    DynamicsModel model;
    VehicleState state;
    StrategyKind strategy;
};

/// Closed-loop game at fixed dt. Both players pick controls from the state
/// at the current grid time (simultaneous move, full mutual observation up
/// to now), then both step. Terminates at the first grid time with
/// separation <= capture_radius, or at t_max.
EngagementResult simulate(const EngagementConfig& config, const Agent& pursuer,
                          const Agent& evader);

/// Time and value of the minimum pointwise separation on the shared grid.
std::pair<double, double> min_separation(const EngagementResult& result);

} // namespace futurecone
