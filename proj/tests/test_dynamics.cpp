#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "futurecone/dynamics.hpp"
#include "futurecone/errors.hpp"
#include "futurecone/rng.hpp"

#include <cmath>

using namespace futurecone;

namespace {

const double kPi = 3.14159265358979323846;

VehicleState at(Vec pos, Vec vel = {}, double heading = 0.0, double time = 0.0) {
    VehicleState s;
    s.position = pos;
    vel.dim = pos.dim;
    s.velocity = vel;
    s.heading = heading;
    s.time = time;
    return s;
}

bool same_vec(const Vec& a, const Vec& b) {
    return a.c == b.c && a.dim == b.dim;
}

bool same_control(const ControlInput& a, const ControlInput& b) {
    if (a.index() != b.index()) return false;
    if (const auto* v = std::get_if<VelocityCommand>(&a))
        return same_vec(v->value, std::get<VelocityCommand>(b).value);
    if (const auto* ac = std::get_if<AccelCommand>(&a))
        return same_vec(ac->value, std::get<AccelCommand>(b).value);
    return std::get<TurnRateCommand>(a).value == std::get<TurnRateCommand>(b).value;
}

} // namespace

TEST_CASE("clamp rescales an over-speed velocity to the cap") {
    auto m = DynamicsModel::make_bounded_speed(1.0);
    auto u = clamp_control(m, VelocityCommand{Vec(3, 0)});
    CHECK(std::get<VelocityCommand>(u).value[0] == doctest::Approx(1.0));
    CHECK(std::get<VelocityCommand>(u).value[1] == 0.0);
}

TEST_CASE("clamp caps a dubins turn rate at speed/r_min") {
    auto m = DynamicsModel::make_dubins(1.0, 1.0);
    auto u = clamp_control(m, TurnRateCommand{5.0});
    CHECK(std::get<TurnRateCommand>(u).value == 1.0);
}

TEST_CASE("an admissible control passes through unchanged") {
    auto m = DynamicsModel::make_double_integrator(1.0);
    ControlInput raw = AccelCommand{Vec(0.5, 0)};
    CHECK(same_control(clamp_control(m, raw), raw));
}

TEST_CASE("clamp rejects mismatched control kinds") {
    auto m = DynamicsModel::make_bounded_speed(1.0);
    CHECK_THROWS_AS(clamp_control(m, TurnRateCommand{0.1}), Error);
    try {
        clamp_control(m, AccelCommand{Vec(0, 0)});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::VariantMismatch);
    }
}

TEST_CASE("clamp is idempotent, bit for bit") {
    SplitMix64 rng(17);
    auto bs = DynamicsModel::make_bounded_speed(1.3);
    auto di = DynamicsModel::make_double_integrator(0.7);
    auto db = DynamicsModel::make_dubins(1.0, 0.5);
    for (int i = 0; i < 500; ++i) {
        Vec raw = rng.unit_vector(2) * rng.uniform(0.0, 4.0);
        ControlInput v_once = clamp_control(bs, VelocityCommand{raw});
        CHECK(same_control(clamp_control(bs, v_once), v_once));
        ControlInput a_once = clamp_control(di, AccelCommand{raw});
        CHECK(same_control(clamp_control(di, a_once), a_once));
        ControlInput w_once = clamp_control(db, TurnRateCommand{rng.uniform(-9, 9)});
        CHECK(same_control(clamp_control(db, w_once), w_once));
    }
}

TEST_CASE("bounded-speed step is a straight segment") {
    auto m = DynamicsModel::make_bounded_speed(1.0);
    auto r = step(m, at(Vec(0, 0)), VelocityCommand{Vec(1, 0)}, 0.5);
    CHECK(r.state.position[0] == doctest::Approx(0.5));
    CHECK(r.state.position[1] == 0.0);
    CHECK(r.state.time == doctest::Approx(0.5));
}

TEST_CASE("double-integrator step uses constant-acceleration kinematics") {
    auto m = DynamicsModel::make_double_integrator(1.0);
    auto r = step(m, at(Vec(0, 0)), AccelCommand{Vec(1, 0)}, 1.0);
    CHECK(r.state.position[0] == doctest::Approx(0.5)); // half a t squared
    CHECK(r.state.velocity[0] == doctest::Approx(1.0));
    CHECK(!r.dv_remaining);
}

TEST_CASE("dubins step traces a quarter circle") {
    auto m = DynamicsModel::make_dubins(1.0, 1.0);
    auto r = step(m, at(Vec(0, 0)), TurnRateCommand{1.0}, kPi / 2.0);
    CHECK(r.state.position[0] == doctest::Approx(1.0));
    CHECK(r.state.position[1] == doctest::Approx(1.0));
    CHECK(r.state.heading == doctest::Approx(kPi / 2.0));
}

TEST_CASE("step rejects inadmissible controls beyond tolerance") {
    auto m = DynamicsModel::make_bounded_speed(1.0);
    CHECK_THROWS_AS(step(m, at(Vec(0, 0)), VelocityCommand{Vec(1.0 + 1e-6, 0)}, 0.1), Error);
    CHECK_NOTHROW(step(m, at(Vec(0, 0)), VelocityCommand{Vec(1.0, 0)}, 0.1));
    CHECK_THROWS_AS(step(m, at(Vec(0, 0)), VelocityCommand{Vec(0.1, 0)}, 0.0), Error);
}

TEST_CASE("delta-v budget depletes and then refuses to overdraw") {
    auto m = DynamicsModel::make_double_integrator(1.0, 0.5);
    auto r1 = step(m, at(Vec(0, 0)), AccelCommand{Vec(1, 0)}, 0.3);
    REQUIRE(r1.dv_remaining);
    CHECK(*r1.dv_remaining == doctest::Approx(0.2));
    auto r2 = step(m, r1.state, AccelCommand{Vec(1, 0)}, 0.2, r1.dv_remaining);
    CHECK(*r2.dv_remaining == doctest::Approx(0.0));
    try {
        step(m, r2.state, AccelCommand{Vec(1, 0)}, 0.2, r2.dv_remaining);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BudgetExhausted);
    }
}

TEST_CASE("bounded-speed displacement never exceeds v_max dt") {
    SplitMix64 rng(4);
    auto m = DynamicsModel::make_bounded_speed(1.7);
    for (int i = 0; i < 300; ++i) {
        Vec u = rng.unit_vector(2) * rng.uniform(0.0, 1.7);
        double dt = rng.uniform(0.01, 2.0);
        VehicleState s0 = at(Vec(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        auto r = step(m, s0, VelocityCommand{u}, dt);
        CHECK((r.state.position - s0.position).norm() <= 1.7 * dt + 1e-9);
    }
}

TEST_CASE("dubins step preserves speed: chord bounded by arc length") {
    SplitMix64 rng(8);
    auto m = DynamicsModel::make_dubins(1.2, 0.8);
    for (int i = 0; i < 300; ++i) {
        double w = rng.uniform(-m.dubins().max_turn_rate(), m.dubins().max_turn_rate());
        double dt = rng.uniform(0.01, 3.0);
        VehicleState s0 = at(Vec(0, 0), Vec(0, 0), rng.uniform(-kPi, kPi));
        auto r = step(m, s0, TurnRateCommand{w}, dt);
        double chord = (r.state.position - s0.position).norm();
        double arc = 1.2 * dt;
        CHECK(chord <= arc + 1e-9);
        // chord of a circular arc: 2 r sin(theta/2)
        double expect =
            std::abs(w) < 1e-12 ? arc : 2.0 * (1.2 / std::abs(w)) * std::sin(std::abs(w) * dt / 2);
        CHECK(chord == doctest::Approx(expect).epsilon(1e-9));
        CHECK(r.state.heading >= -kPi);
        CHECK(r.state.heading < kPi);
    }
}

TEST_CASE("constant-control steps compose as a flow map") {
    SplitMix64 rng(12);
    auto bs = DynamicsModel::make_bounded_speed(1.0);
    auto di = DynamicsModel::make_double_integrator(0.9);
    auto db = DynamicsModel::make_dubins(1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double dt1 = rng.uniform(0.01, 1.0), dt2 = rng.uniform(0.01, 1.0);

        Vec uv = rng.unit_vector(2) * rng.uniform(0.0, 1.0);
        VehicleState s = at(Vec(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        Vec one = step(bs, s, VelocityCommand{uv}, dt1 + dt2).state.position;
        Vec two = step(bs, step(bs, s, VelocityCommand{uv}, dt1).state, VelocityCommand{uv}, dt2)
                      .state.position;
        CHECK((one - two).norm() <= 1e-12);

        Vec ua = rng.unit_vector(2) * rng.uniform(0.0, 0.9);
        VehicleState sd = at(Vec(0, 0), rng.unit_vector(2) * rng.uniform(0.0, 1.0));
        auto d_one = step(di, sd, AccelCommand{ua}, dt1 + dt2).state;
        auto d_two =
            step(di, step(di, sd, AccelCommand{ua}, dt1).state, AccelCommand{ua}, dt2).state;
        CHECK((d_one.position - d_two.position).norm() <= 1e-12);
        CHECK((d_one.velocity - d_two.velocity).norm() <= 1e-12);

        double w = rng.uniform(-1.0, 1.0);
        VehicleState sb = at(Vec(0, 0), Vec(0, 0), rng.uniform(-kPi, kPi));
        auto b_one = step(db, sb, TurnRateCommand{w}, dt1 + dt2).state;
        auto b_two =
            step(db, step(db, sb, TurnRateCommand{w}, dt1).state, TurnRateCommand{w}, dt2).state;
        CHECK((b_one.position - b_two.position).norm() <= 1e-10);
        CHECK(std::abs(wrap_angle(b_one.heading - b_two.heading)) <= 1e-10);
    }
}

TEST_CASE("model parameter validation") {
    CHECK_THROWS_AS(DynamicsModel::make_bounded_speed(0.0).validate(), Error);
    CHECK_THROWS_AS(DynamicsModel::make_double_integrator(-1.0).validate(), Error);
    CHECK_THROWS_AS(DynamicsModel::make_double_integrator(1.0, -0.5).validate(), Error);
    CHECK_THROWS_AS(DynamicsModel::make_dubins(1.0, 0.0).validate(), Error);
    CHECK_NOTHROW(DynamicsModel::make_double_integrator(1.0, 0.0).validate());
}
