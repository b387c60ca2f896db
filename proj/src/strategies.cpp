#include "futurecone/strategies.hpp"

#include "futurecone/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace futurecone {

namespace {
constexpr double kTiny = 1e-12;
constexpr double kTwoPi = 6.2831853071795864769;
constexpr double kHeadingTimeConstant = 0.1; // s; steering gain for Dubins
} // namespace

void ObservedHistory::push(double t, const Vec& p) {
    if (!samples.empty() && !(t > samples.back().first))
        throw Error(Errc::ConfigError, "history times must be strictly increasing");
    samples.emplace_back(t, p);
}

const std::pair<double, Vec>& ObservedHistory::latest() const {
    if (samples.empty()) throw Error(Errc::ConfigError, "history has no samples");
    return samples.back();
}

Vec ObservedHistory::latest_velocity_estimate() const {
    if (samples.size() < 2) return Vec::zero(latest().second.dim);
    const auto& [t1, p1] = samples[samples.size() - 2];
    const auto& [t2, p2] = samples.back();
    double dt = t2 - t1;
    if (dt <= kTiny) return Vec::zero(p2.dim);
    return (p2 - p1) * (1.0 / dt);
}

std::string strategy_name(const StrategyKind& kind) {
    if (std::holds_alternative<PurePursuitSpec>(kind)) return "pure_pursuit";
    if (std::holds_alternative<LeafPlanPursuitSpec>(kind)) return "leaf_plan_pursuit";
    if (std::holds_alternative<StraightLineSpec>(kind)) return "straight_line";
    if (std::holds_alternative<GreedyEscapeSpec>(kind)) return "greedy_escape";
    return "random_maneuver";
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "pure_pursuit" || name == "pure") return PurePursuitSpec{};
    if (name == "leaf_plan_pursuit" || name == "leafplan") return LeafPlanPursuitSpec{};
    if (name == "straight_line" || name == "straight") return StraightLineSpec{};
    if (name == "greedy_escape" || name == "greedy") return GreedyEscapeSpec{};
    if (name == "random_maneuver" || name == "random") return RandomManeuverSpec{};
    throw Error(Errc::ConfigError, "unknown strategy '" + name + "'");
}

std::vector<double> PlannerSettings::grid_after(double now) const {
    std::vector<double> times;
    double step = horizon_end / n_leaves;
    for (int k = 1; k <= n_leaves; ++k) {
        double t = k == n_leaves ? horizon_end : k * step;
        if (t > now + kTiny) times.push_back(t);
    }
    return times;
}

namespace {

// Latest observed state of a player, velocity from finite differences,
// heading (Dubins) from the velocity estimate.
VehicleState estimate_vertex(const DynamicsModel& model, const ObservedHistory& hist) {
    const auto& [t_obs, p_obs] = hist.latest();
    VehicleState s;
    s.position = p_obs;
    s.velocity = hist.latest_velocity_estimate();
    s.time = t_obs;
    if (model.kind() == ModelKind::Dubins && s.velocity.norm() > kTiny)
        s.heading = std::atan2(s.velocity[1], s.velocity[0]);
    return s;
}

Vec project_into_leaf(const Leaf& leaf, Vec aim) {
    if (leaf.is_ball()) {
        const Ball& b = leaf.ball();
        Vec off = aim - b.center;
        double d = off.norm();
        if (d > b.radius && d > kTiny) return b.center + off * (b.radius / d);
        return aim;
    }
    if (leaf.cloud().hull.signed_distance(aim) >= 0.0) return aim;
    double best = std::numeric_limits<double>::infinity();
    Vec nearest = aim;
    for (const Vec& p : leaf.cloud().points) {
        double d = (p - aim).norm();
        if (d < best) {
            best = d;
            nearest = p; // nearest attainable sample
        }
    }
    return nearest;
}

// Same per-time math as plan_intercept_point, but leaves are built on demand
// in time order and the walk stops at the first containment.
std::optional<InterceptPlan> scan_first_containment(const DynamicsModel& own_model,
                                                    const VehicleState& own,
                                                    const DynamicsModel& target_model,
                                                    const ObservedHistory& target_history,
                                                    const std::vector<double>& times, double now,
                                                    double tol, const ConeOptions& opts) {
    VehicleState target_vertex = estimate_vertex(target_model, target_history);
    for (double t : times) {
        if (t <= now + kTiny) continue;
        Leaf outer = make_leaf(own_model, own, t, opts);
        Leaf inner = make_leaf(target_model, target_vertex, t, opts);
        ContainmentVerdict v = leaf_contains(outer, inner, tol);
        if (!v.contained) continue;
        Vec aim = target_vertex.position + target_vertex.velocity * (t - target_vertex.time);
        return InterceptPlan{t, project_into_leaf(inner, aim), v.margin};
    }
    return std::nullopt;
}

} // namespace

ControlInput control_toward(const DynamicsModel& model, const VehicleState& own, const Vec& aim) {
    Vec to = aim - own.position;
    double dist = to.norm();

    if (model.kind() == ModelKind::Dubins) {
        if (dist <= kTiny) return TurnRateCommand{0.0};
        double desired = std::atan2(to[1], to[0]);
        double err = wrap_angle(desired - own.heading);
        double w_max = model.dubins().max_turn_rate();
        return TurnRateCommand{std::clamp(err / kHeadingTimeConstant, -w_max, w_max)};
    }

    if (dist <= kTiny) return zero_control(model, own.dim());
    Vec u = to * (model.control_bound() / dist);
    return clamp_control(model, model.kind() == ModelKind::BoundedSpeed
                                    ? ControlInput{VelocityCommand{u}}
                                    : ControlInput{AccelCommand{u}});
}

InterceptPlan plan_intercept_point(const FutureCone& pursuer_cone,
                                   const DynamicsModel& target_model,
                                   const ObservedHistory& target_history, double now, double tol,
                                   const ConeOptions& target_cone_options) {
    if (pursuer_cone.leaves.empty() || pursuer_cone.t_end <= now + kTiny)
        throw Error(Errc::ConfigError, "pursuer cone does not cover times beyond now");

    VehicleState target_vertex = estimate_vertex(target_model, target_history);
    FutureCone target_cone = build_cone_at_times(target_model, target_vertex,
                                                 pursuer_cone.leaf_times(), target_cone_options);
    ContainmentReport report = cone_contains(pursuer_cone, target_cone, tol);

    // Only intercept times strictly in the future qualify.
    std::optional<double> t_i;
    double margin = 0.0;
    for (const auto& [t, verdict] : report.per_time) {
        if (t > now + kTiny && verdict.contained) {
            t_i = t;
            margin = verdict.margin;
            break;
        }
    }
    if (!t_i)
        throw Error(Errc::NoGuarantee, "no grid time achieves cone containment");

    Vec aim = target_vertex.position + target_vertex.velocity * (*t_i - target_vertex.time);
    if (const Leaf* leaf = target_cone.leaf_at(*t_i)) aim = project_into_leaf(*leaf, aim);
    return InterceptPlan{*t_i, aim, margin};
}

ControlInput pursuit_control(const StrategyKind& kind, const VehicleState& own,
                             const DynamicsModel& model, const ObservedHistory& target_history,
                             double now, const PlannerSettings& planner,
                             const std::optional<DynamicsModel>& target_model) {
    if (std::holds_alternative<PurePursuitSpec>(kind))
        return control_toward(model, own, target_history.latest().second);

    if (std::holds_alternative<LeafPlanPursuitSpec>(kind)) {
        std::optional<InterceptPlan> plan = scan_first_containment(
            model, own, target_model.value_or(model), target_history, planner.grid_after(now),
            now, planner.tol, planner.cone_options);
        if (plan) return control_toward(model, own, plan->aim_point);
        return control_toward(model, own, target_history.latest().second);
    }

    throw Error(Errc::ConfigError,
                "pursuit_control requires a pursuit strategy, got " + strategy_name(kind));
}

ControlInput escape_control(const VehicleState& own, const DynamicsModel& model,
                            const Leaf& pursuer_leaf_at_horizon, double horizon) {
    if (!(horizon > 0.0)) throw Error(Errc::ConfigError, "escape horizon must be > 0");

    auto leaf_margin = [&](const Vec& p) {
        if (pursuer_leaf_at_horizon.is_ball()) {
            const Ball& b = pursuer_leaf_at_horizon.ball();
            return b.radius - (p - b.center).norm();
        }
        return pursuer_leaf_at_horizon.cloud().hull.signed_distance(p);
    };

    std::vector<ControlInput> fan;
    double bound = model.control_bound();
    int dim = own.dim();
    if (model.kind() == ModelKind::Dubins) {
        constexpr int kFan = 64;
        for (int j = 0; j < kFan; ++j)
            fan.push_back(TurnRateCommand{-bound + 2.0 * bound * j / (kFan - 1)});
    } else if (dim == 2) {
        constexpr int kFan = 64;
        for (int j = 0; j < kFan; ++j) {
            double a = kTwoPi * j / kFan;
            Vec u(bound * std::cos(a), bound * std::sin(a));
            fan.push_back(model.kind() == ModelKind::BoundedSpeed
                              ? ControlInput{VelocityCommand{u}}
                              : ControlInput{AccelCommand{u}});
        }
    } else {
        constexpr int kFan = 266; // quasi-uniform sphere fan
        for (int j = 0; j < kFan; ++j) {
            double z = 1.0 - 2.0 * (j + 0.5) / kFan;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double phi = kTwoPi * j * 0.6180339887498948482;
            Vec u(bound * r * std::cos(phi), bound * r * std::sin(phi), bound * z);
            fan.push_back(model.kind() == ModelKind::BoundedSpeed
                              ? ControlInput{VelocityCommand{u}}
                              : ControlInput{AccelCommand{u}});
        }
    }

    double best_margin = std::numeric_limits<double>::infinity();
    size_t best = 0;
    for (size_t j = 0; j < fan.size(); ++j) {
        ControlInput u = clamp_control(model, fan[j]);
        VehicleState end = step(model, own, u, horizon).state;
        double m = leaf_margin(end.position);
        if (m < best_margin) {
            best_margin = m;
            best = j;
        }
    }
    return clamp_control(model, fan[best]);
}

StrategyRunner::StrategyRunner(const StrategyKind& kind, const DynamicsModel& own_model,
                               const DynamicsModel& opponent_model,
                               const PlannerSettings& planner)
    : kind_(kind), own_model_(own_model), opp_model_(opponent_model), planner_(planner) {
    if (const auto* lp = std::get_if<LeafPlanPursuitSpec>(&kind_)) {
        if (lp->replan_every < 1)
            throw Error(Errc::ConfigError, "replan_every must be >= 1");
    }
    if (const auto* rm = std::get_if<RandomManeuverSpec>(&kind_)) {
        if (!(rm->dwell > 0.0)) throw Error(Errc::ConfigError, "dwell must be > 0");
    }
    if (const auto* ge = std::get_if<GreedyEscapeSpec>(&kind_)) {
        if (!(ge->horizon > 0.0)) throw Error(Errc::ConfigError, "horizon must be > 0");
    }
}

ControlInput StrategyRunner::decide_leaf_plan(const VehicleState& own, const ObservedHistory& opp,
                                              double now, int replan_every) {
    bool stale = !plan_ || steps_since_replan_ >= replan_every || plan_->t_i <= now + kTiny;
    if (stale) {
        steps_since_replan_ = 0;
        plan_ = scan_first_containment(own_model_, own, opp_model_, opp,
                                       planner_.grid_after(now), now, planner_.tol,
                                       planner_.cone_options);
    }
    ++steps_since_replan_;
    if (plan_) return control_toward(own_model_, own, plan_->aim_point);
    return control_toward(own_model_, own, opp.latest().second); // fallback: pure pursuit
}

ControlInput StrategyRunner::decide_greedy_escape(const VehicleState& own,
                                                  const ObservedHistory& opp, double now,
                                                  double horizon) {
    const auto& [t_obs, p_obs] = opp.latest();
    VehicleState pursuer_est;
    pursuer_est.position = p_obs;
    pursuer_est.velocity = opp.latest_velocity_estimate();
    pursuer_est.time = t_obs;
    if (opp_model_.kind() == ModelKind::Dubins && pursuer_est.velocity.norm() > kTiny)
        pursuer_est.heading = std::atan2(pursuer_est.velocity[1], pursuer_est.velocity[0]);

    double leaf_time = now + horizon;
    Leaf pursuer_leaf;
    try {
        pursuer_leaf = analytic_leaf(opp_model_, pursuer_est, leaf_time);
    } catch (const Error& e) {
        if (e.code() != Errc::UnsupportedAnalytic) throw;
        pursuer_leaf = sampled_leaf(opp_model_, pursuer_est, leaf_time,
                                    planner_.cone_options.n_controls,
                                    planner_.cone_options.n_switches);
    }
    return escape_control(own, own_model_, pursuer_leaf, horizon);
}

ControlInput StrategyRunner::decide(const VehicleState& own, const ObservedHistory& opponent,
                                    double now) {
    if (std::holds_alternative<PurePursuitSpec>(kind_))
        return control_toward(own_model_, own, opponent.latest().second);

    if (const auto* lp = std::get_if<LeafPlanPursuitSpec>(&kind_))
        return decide_leaf_plan(own, opponent, now, lp->replan_every);

    if (const auto* sl = std::get_if<StraightLineSpec>(&kind_)) {
        if (!line_dir_) {
            Vec dir = sl->direction;
            if (dir.norm() <= kTiny) dir = own.position - opponent.latest().second;
            if (dir.norm() <= kTiny) dir = own.dim() == 2 ? Vec(1, 0) : Vec(1, 0, 0);
            dir.dim = own.dim();
            line_dir_ = unit_or_zero(dir);
        }
        if (own_model_.kind() == ModelKind::Dubins) {
            double desired = std::atan2((*line_dir_)[1], (*line_dir_)[0]);
            double err = wrap_angle(desired - own.heading);
            double w_max = own_model_.dubins().max_turn_rate();
            return TurnRateCommand{std::clamp(err / kHeadingTimeConstant, -w_max, w_max)};
        }
        Vec u = *line_dir_ * own_model_.control_bound();
        return clamp_control(own_model_, own_model_.kind() == ModelKind::BoundedSpeed
                                             ? ControlInput{VelocityCommand{u}}
                                             : ControlInput{AccelCommand{u}});
    }

    if (const auto* ge = std::get_if<GreedyEscapeSpec>(&kind_))
        return decide_greedy_escape(own, opponent, now, ge->horizon);

    const auto& rm = std::get<RandomManeuverSpec>(kind_);
    if (!rng_) {
        rng_.emplace(rm.seed);
        next_redraw_ = now;
    }
    if (!held_ || now >= next_redraw_ - kTiny) {
        next_redraw_ = now + rm.dwell;
        if (own_model_.kind() == ModelKind::Dubins) {
            double b = own_model_.control_bound();
            held_ = TurnRateCommand{rng_->uniform(-b, b)};
        } else {
            Vec u = rng_->unit_vector(own.dim()) * own_model_.control_bound();
            held_ = clamp_control(own_model_, own_model_.kind() == ModelKind::BoundedSpeed
                                                  ? ControlInput{VelocityCommand{u}}
                                                  : ControlInput{AccelCommand{u}});
        }
    }
    return *held_;
}

} // namespace futurecone
