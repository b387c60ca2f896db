#include "futurecone/dynamics.hpp"

#include "futurecone/errors.hpp"

#include <cmath>

namespace futurecone {

namespace {
constexpr double kAdmissibleTol = 1e-12;
constexpr double kPi = 3.141592653589793238462643;
} // namespace

double wrap_angle(double a) {
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::BoundedSpeed: return "bounded_speed";
        case ModelKind::DoubleIntegrator: return "double_integrator";
        case ModelKind::Dubins: return "dubins";
    }
    return "?";
}

double DynamicsModel::control_bound() const {
    switch (kind()) {
        case ModelKind::BoundedSpeed: return bounded_speed().v_max;
        case ModelKind::DoubleIntegrator: return double_integrator().a_max;
        case ModelKind::Dubins: return dubins().max_turn_rate();
    }
    return 0.0;
}

void DynamicsModel::validate() const {
    switch (kind()) {
        case ModelKind::BoundedSpeed:
            if (!(bounded_speed().v_max > 0.0))
                throw Error(Errc::ConfigError, "bounded_speed requires v_max > 0");
            break;
        case ModelKind::DoubleIntegrator: {
            const auto& m = double_integrator();
            if (!(m.a_max > 0.0))
                throw Error(Errc::ConfigError, "double_integrator requires a_max > 0");
            if (m.dv_budget && !(*m.dv_budget >= 0.0))
                throw Error(Errc::ConfigError, "dv_budget must be >= 0");
            break;
        }
        case ModelKind::Dubins:
            if (!(dubins().speed > 0.0) || !(dubins().r_min > 0.0))
                throw Error(Errc::ConfigError, "dubins requires speed > 0 and r_min > 0");
            break;
    }
}

double control_magnitude(const ControlInput& u) {
    if (const auto* v = std::get_if<VelocityCommand>(&u)) return v->value.norm();
    if (const auto* a = std::get_if<AccelCommand>(&u)) return a->value.norm();
    return std::abs(std::get<TurnRateCommand>(u).value);
}

namespace {

void require_kind_match(const DynamicsModel& model, const ControlInput& u) {
    bool ok = false;
    switch (model.kind()) {
        case ModelKind::BoundedSpeed: ok = std::holds_alternative<VelocityCommand>(u); break;
        case ModelKind::DoubleIntegrator: ok = std::holds_alternative<AccelCommand>(u); break;
        case ModelKind::Dubins: ok = std::holds_alternative<TurnRateCommand>(u); break;
    }
    if (!ok)
        throw Error(Errc::VariantMismatch,
                    "control kind does not match model kind " + model_kind_name(model.kind()));
}

Vec rescaled(const Vec& v, double bound) {
    double n = v.norm();
    if (n <= bound) return v;
    Vec s = v * (bound / n);
    // A single rescale can land an ulp above the bound; nudge down until
    // inside so clamping already-clamped controls is a bit-exact no-op.
    constexpr double kNudge = 0x1.fffffffffffffp-1;
    while (s.norm() > bound) s *= kNudge;
    return s;
}

} // namespace

ControlInput clamp_control(const DynamicsModel& model, const ControlInput& raw) {
    require_kind_match(model, raw);
    switch (model.kind()) {
        case ModelKind::BoundedSpeed:
            return VelocityCommand{
                rescaled(std::get<VelocityCommand>(raw).value, model.bounded_speed().v_max)};
        case ModelKind::DoubleIntegrator:
            return AccelCommand{
                rescaled(std::get<AccelCommand>(raw).value, model.double_integrator().a_max)};
        case ModelKind::Dubins: {
            double b = model.dubins().max_turn_rate();
            double w = std::get<TurnRateCommand>(raw).value;
            return TurnRateCommand{std::clamp(w, -b, b)};
        }
    }
    return raw;
}

ControlInput zero_control(const DynamicsModel& model, int dim) {
    switch (model.kind()) {
        case ModelKind::BoundedSpeed: return VelocityCommand{Vec::zero(dim)};
        case ModelKind::DoubleIntegrator: return AccelCommand{Vec::zero(dim)};
        case ModelKind::Dubins: return TurnRateCommand{0.0};
    }
    return TurnRateCommand{0.0};
}

StepResult step(const DynamicsModel& model, const VehicleState& s, const ControlInput& u,
                double dt, std::optional<double> dv_remaining) {
    if (!(dt > 0.0)) throw Error(Errc::ConfigError, "step requires dt > 0");
    require_kind_match(model, u);
    if (control_magnitude(u) > model.control_bound() + kAdmissibleTol)
        throw Error(Errc::InadmissibleControl, "control magnitude exceeds model bound");

    StepResult out;
    out.state = s;
    out.state.time = s.time + dt;

    switch (model.kind()) {
        case ModelKind::BoundedSpeed: {
            const Vec& v = std::get<VelocityCommand>(u).value;
            out.state.position = s.position + v * dt;
            out.state.velocity = v;
            break;
        }
        case ModelKind::DoubleIntegrator: {
            const Vec& a = std::get<AccelCommand>(u).value;
            const auto& m = model.double_integrator();
            if (m.dv_budget) {
                double remaining = dv_remaining.value_or(*m.dv_budget);
                double spend = a.norm() * dt;
                if (remaining - spend < -kAdmissibleTol)
                    throw Error(Errc::BudgetExhausted, "step would exceed the delta-v budget");
                out.dv_remaining = remaining - spend;
            }
            out.state.position = s.position + s.velocity * dt + a * (0.5 * dt * dt);
            out.state.velocity = s.velocity + a * dt;
            break;
        }
        case ModelKind::Dubins: {
            double w = std::get<TurnRateCommand>(u).value;
            double v = model.dubins().speed;
            double th = s.heading;
            // Below this rate the arc is numerically a straight segment.
            if (std::abs(w) < 1e-12) {
                out.state.position =
                    s.position + Vec(std::cos(th), std::sin(th)) * (v * dt);
                out.state.heading = wrap_angle(th);
            } else {
                double th1 = th + w * dt;
                double r = v / w;
                out.state.position =
                    s.position + Vec(r * (std::sin(th1) - std::sin(th)),
                                     r * (std::cos(th) - std::cos(th1)));
                out.state.heading = wrap_angle(th1);
            }
            out.state.velocity =
                Vec(std::cos(out.state.heading), std::sin(out.state.heading)) * v;
            break;
        }
    }
    return out;
}

} // namespace futurecone
