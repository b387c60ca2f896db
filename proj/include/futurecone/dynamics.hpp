#pragma once

#include "futurecone/geometry.hpp"

#include <optional>
#include <string>
#include <variant>

namespace futurecone {

/// Kinematic state of one vehicle. heading is meaningful for Dubins (d=2)
/// only and is kept normalized to [-pi, pi); velocity is used by the
/// double-integrator model and carried as a diagnostic for the others.
struct VehicleState {
    Vec position;
    Vec velocity;
    double heading = 0.0;
    double time = 0.0;

    int dim() const { return position.dim; }
};

/// Velocity is the control, ||u|| <= v_max.
struct BoundedSpeedModel {
    double v_max;
};

/// Acceleration is the control, ||u|| <= a_max; optional cumulative
/// integral of ||u|| dt capped by dv_budget.
struct DoubleIntegratorModel {
    double a_max;
    std::optional<double> dv_budget;
};

/// Planar constant-speed vehicle with bounded turn rate |u| <= speed/r_min.
struct DubinsModel {
    double speed;
    double r_min;

    double max_turn_rate() const { return speed / r_min; }
};

enum class ModelKind { BoundedSpeed, DoubleIntegrator, Dubins };

struct DynamicsModel {
    std::variant<BoundedSpeedModel, DoubleIntegratorModel, DubinsModel> model;

    ModelKind kind() const { return static_cast<ModelKind>(model.index()); }
    const BoundedSpeedModel& bounded_speed() const { return std::get<BoundedSpeedModel>(model); }
    const DoubleIntegratorModel& double_integrator() const {
        return std::get<DoubleIntegratorModel>(model);
    }
    const DubinsModel& dubins() const { return std::get<DubinsModel>(model); }

    /// Magnitude bound on the control (speed, acceleration or turn rate).
    double control_bound() const;
    /// True when every parameter satisfies its positivity constraint.
    void validate() const;

    static DynamicsModel make_bounded_speed(double v_max) { return {BoundedSpeedModel{v_max}}; }
    static DynamicsModel make_double_integrator(double a_max,
                                                std::optional<double> dv_budget = {}) {
        return {DoubleIntegratorModel{a_max, dv_budget}};
    }
    static DynamicsModel make_dubins(double speed, double r_min) {
        return {DubinsModel{speed, r_min}};
    }
};

struct VelocityCommand {
    Vec value;
};
struct AccelCommand {
    Vec value;
};
struct TurnRateCommand {
    double value;
};

using ControlInput = std::variant<VelocityCommand, AccelCommand, TurnRateCommand>;

std::string model_kind_name(ModelKind k);

/// Magnitude of a control (vector norm or |turn rate|).
double control_magnitude(const ControlInput& u);

/// Clamps a raw control into the admissible set of the model: vector
/// controls are rescaled preserving direction, the Dubins turn rate is
/// capped. Admissible controls pass through unchanged. Idempotent.
ControlInput clamp_control(const DynamicsModel& model, const ControlInput& raw);

/// A zero (coasting / no-turn) control of the kind the model expects.
ControlInput zero_control(const DynamicsModel& model, int dim);

struct StepResult {
    VehicleState state;
    /// Remaining delta-v after the step; present iff the model is budgeted.
    std::optional<double> dv_remaining;
};

/// Advances the state by dt under constant control using the model's exact
/// flow map (straight segment, constant-acceleration kinematics, circular
/// arc). For a budgeted double integrator the remaining delta-v is
/// decremented by ||u||*dt; pass dv_remaining to thread the budget through
/// successive steps (defaults to the full budget).
StepResult step(const DynamicsModel& model, const VehicleState& s, const ControlInput& u,
                double dt, std::optional<double> dv_remaining = {});

double wrap_angle(double a); // into [-pi, pi)

} // namespace futurecone
