#include "futurecone/engagement.hpp"

#include "futurecone/errors.hpp"

#include <cmath>
#include <limits>

namespace futurecone {

namespace {
constexpr double kTimeTol = 1e-12;
// Separations are computed in floating point, so an exact-arithmetic hit
// (capture_radius = 0) leaves an ulp-scale residue instead of zero. The
// capture test carries this allowance so such hits land on the grid.
constexpr double kCaptureRoundoff = 1e-9;

// Scales a budgeted acceleration command down to what the remaining delta-v
// affords; an exhausted vehicle coasts.
ControlInput apply_budget(const DynamicsModel& model, const ControlInput& u, double dt,
                          const std::optional<double>& dv_remaining) {
    if (model.kind() != ModelKind::DoubleIntegrator || !dv_remaining) return u;
    double spend = control_magnitude(u) * dt;
    if (spend <= *dv_remaining) return u;
    if (spend <= 0.0) return u;
    double scale = std::max(0.0, *dv_remaining) / spend;
    return AccelCommand{std::get<AccelCommand>(u).value * scale};
}
} // namespace

void EngagementConfig::validate() const {
    if (!(dt > 0.0)) throw Error(Errc::ConfigError, "dt must be > 0");
    if (!(t_max > 0.0)) throw Error(Errc::ConfigError, "t_max must be > 0");
    if (dt > t_max) throw Error(Errc::ConfigError, "dt must not exceed t_max");
    if (!(capture_radius >= 0.0)) throw Error(Errc::ConfigError, "capture_radius must be >= 0");
    if (arena_radius && !(*arena_radius > 0.0))
        throw Error(Errc::ConfigError, "arena_radius must be > 0");
}

EngagementResult simulate(const EngagementConfig& config, const Agent& pursuer,
                          const Agent& evader) {
    config.validate();
    pursuer.model.validate();
    evader.model.validate();
    if (pursuer.state.dim() != evader.state.dim())
        throw Error(Errc::ConfigError, "players must share the spatial dimension");
    if (std::abs(pursuer.state.time) > kTimeTol || std::abs(evader.state.time) > kTimeTol)
        throw Error(Errc::ConfigError, "engagements start at time 0");

    PlannerSettings planner = config.planner;
    if (planner.horizon_end <= 0.0) planner.horizon_end = config.t_max;

    StrategyRunner pursuit(pursuer.strategy, pursuer.model, evader.model, planner);
    StrategyRunner evasion(evader.strategy, evader.model, pursuer.model, planner);

    VehicleState x = pursuer.state;
    VehicleState y = evader.state;
    std::optional<double> dv_x, dv_y;
    if (pursuer.model.kind() == ModelKind::DoubleIntegrator)
        dv_x = pursuer.model.double_integrator().dv_budget;
    if (evader.model.kind() == ModelKind::DoubleIntegrator)
        dv_y = evader.model.double_integrator().dv_budget;

    ObservedHistory evader_seen, pursuer_seen;

    EngagementResult result;
    result.min_separation = (x.position - y.position).norm();
    result.min_separation_time = 0.0;

    const long max_steps = static_cast<long>(std::ceil(config.t_max / config.dt)) + 1;
    for (long k = 0; k <= max_steps; ++k) {
        double t = k * config.dt;
        x.time = t;
        y.time = t;
        evader_seen.push(t, y.position);
        pursuer_seen.push(t, x.position);
        result.trajectory_x.emplace_back(t, x.position);
        result.trajectory_y.emplace_back(t, y.position);

        double sep = (x.position - y.position).norm();
        if (sep < result.min_separation) {
            result.min_separation = sep;
            result.min_separation_time = t;
        }
        if (sep <= config.capture_radius + kCaptureRoundoff) {
            result.outcome = Outcome::Intercept;
            result.intercept_time = t;
            return result;
        }
        if (t >= config.t_max - kTimeTol) break;
        if (config.arena_radius && y.position.norm() > *config.arena_radius) break;

        // Simultaneous move: both controls from the state at time t.
        ControlInput ux = clamp_control(pursuer.model, pursuit.decide(x, evader_seen, t));
        ControlInput uy = clamp_control(evader.model, evasion.decide(y, pursuer_seen, t));
        ux = apply_budget(pursuer.model, ux, config.dt, dv_x);
        uy = apply_budget(evader.model, uy, config.dt, dv_y);

        StepResult sx = step(pursuer.model, x, ux, config.dt, dv_x);
        StepResult sy = step(evader.model, y, uy, config.dt, dv_y);
        x = sx.state;
        y = sy.state;
        dv_x = sx.dv_remaining;
        dv_y = sy.dv_remaining;
    }

    result.outcome = Outcome::Escape;
    return result;
}

std::pair<double, double> min_separation(const EngagementResult& result) {
    if (result.trajectory_x.empty() || result.trajectory_y.empty() ||
        result.trajectory_x.size() != result.trajectory_y.size())
        throw Error(Errc::EmptyTrajectory, "result holds no usable trajectory samples");

    double best = std::numeric_limits<double>::infinity();
    double at = result.trajectory_x.front().first;
    for (size_t i = 0; i < result.trajectory_x.size(); ++i) {
        double sep = (result.trajectory_x[i].second - result.trajectory_y[i].second).norm();
        if (sep < best) {
            best = sep;
            at = result.trajectory_x[i].first;
        }
    }
    return {at, best};
}

} // namespace futurecone
