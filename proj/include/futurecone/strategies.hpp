#pragma once

#include "futurecone/cones.hpp"
#include "futurecone/dynamics.hpp"
#include "futurecone/rng.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace futurecone {

/// Time-ordered opponent position samples as seen by one player.
struct ObservedHistory {
    std::vector<std::pair<double, Vec>> samples;

    void push(double t, const Vec& p);
    const std::pair<double, Vec>& latest() const;
    /// Finite difference of the last two samples; zero with one sample.
    Vec latest_velocity_estimate() const;
};

struct PurePursuitSpec {};
struct LeafPlanPursuitSpec {
    int replan_every = 5; // steps between replans
};
struct StraightLineSpec {
    /// Fixed flight direction; a zero vector means "radially away from the
    /// opponent's position when the engagement starts".
    Vec direction;
};
struct GreedyEscapeSpec {
    double horizon = 0.5; // s
};
struct RandomManeuverSpec {
    uint64_t seed = 1;
    double dwell = 0.5; // s between redraws
};

using StrategyKind = std::variant<PurePursuitSpec, LeafPlanPursuitSpec, StraightLineSpec,
                                  GreedyEscapeSpec, RandomManeuverSpec>;

std::string strategy_name(const StrategyKind& kind);
StrategyKind strategy_from_name(const std::string& name);

struct InterceptPlan {
    double t_i = 0.0;
    Vec aim_point;
    double margin_at_plan = 0.0;
};

/// Planning-grid parameters shared by the plan/escape policies. Grid times
/// are anchored at absolute multiples of horizon_end/n_leaves so replanning
/// against a target that moves exactly as predicted is a fixed point.
struct PlannerSettings {
    double horizon_end = 5.0;
    int n_leaves = 20;
    double tol = 1e-9; // containment slack absorbing roundoff
    ConeOptions cone_options{LeafMethod::Analytic, true, 256, 2, false};

    std::vector<double> grid_after(double now) const;
};

/// Predict-contain-aim: builds the target's cone from its latest observed
/// state on the pursuer cone's own grid, takes the first containment time
/// t_i, and aims at the constant-velocity extrapolation of the target to
/// t_i (projected into the target's leaf when the extrapolation exits it).
/// Throws NoGuarantee when no grid time achieves containment.
InterceptPlan plan_intercept_point(const FutureCone& pursuer_cone,
                                   const DynamicsModel& target_model,
                                   const ObservedHistory& target_history, double now,
                                   double tol = 1e-9,
                                   const ConeOptions& target_cone_options = {
                                       LeafMethod::Analytic, true, 256, 2, false});

/// Stateless pursuit control. PurePursuit heads for the target's latest
/// position at full authority; LeafPlanPursuit plans afresh and heads for
/// the aim point (falling back to pure pursuit without a guarantee). The
/// target is modeled by target_model when given, else by the own model.
ControlInput pursuit_control(const StrategyKind& kind, const VehicleState& own,
                             const DynamicsModel& model, const ObservedHistory& target_history,
                             double now, const PlannerSettings& planner = {},
                             const std::optional<DynamicsModel>& target_model = {});

/// Evaluates a deterministic fan of admissible constant controls over the
/// horizon and returns the one whose endpoint exits the pursuer's leaf the
/// farthest (minimum containment margin); ties go to the lowest fan index.
ControlInput escape_control(const VehicleState& own, const DynamicsModel& model,
                            const Leaf& pursuer_leaf_at_horizon, double horizon);

/// Max-authority control from `own` toward a fixed point.
ControlInput control_toward(const DynamicsModel& model, const VehicleState& own, const Vec& aim);

/// Deterministic state machine wrapping one StrategyKind for the engagement
/// loop: caches intercept plans between replans, holds random-maneuver draws
/// for their dwell, resolves the straight-line direction once.
class StrategyRunner {
public:
    StrategyRunner(const StrategyKind& kind, const DynamicsModel& own_model,
                   const DynamicsModel& opponent_model, const PlannerSettings& planner);

    ControlInput decide(const VehicleState& own, const ObservedHistory& opponent, double now);

    const std::optional<InterceptPlan>& current_plan() const { return plan_; }

private:
    StrategyKind kind_;
    DynamicsModel own_model_;
    DynamicsModel opp_model_;
    PlannerSettings planner_;

    std::optional<InterceptPlan> plan_;
    int steps_since_replan_ = 0;

    std::optional<SplitMix64> rng_;
    std::optional<ControlInput> held_;
    double next_redraw_ = 0.0;

    std::optional<Vec> line_dir_;

    ControlInput decide_leaf_plan(const VehicleState& own, const ObservedHistory& opp, double now,
                                  int replan_every);
    ControlInput decide_greedy_escape(const VehicleState& own, const ObservedHistory& opp,
                                      double now, double horizon);
};

} // namespace futurecone
