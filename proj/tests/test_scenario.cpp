#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "futurecone/errors.hpp"
#include "futurecone/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

using namespace futurecone;

namespace {

const char* kBallScenario = R"({
  "dimension": 2,
  "pursuer": {"model": "bounded_speed", "params": {"v_max": 2.0}, "position": [0, 0]},
  "evader": {"model": "bounded_speed", "params": {"v_max": 1.0}, "position": [1, 0]},
  "window": {"t_start": 0.5, "t_end": 2.0, "n_leaves": 4},
  "engagement": {"dt": 0.01, "t_max": 5.0, "capture_radius": 0.1},
  "seed": 7
})";

std::string expect_schema_error(const std::string& text) {
    try {
        ScenarioFile::parse(text);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SchemaError);
        return e.what();
    }
    FAIL("expected a schema error");
    return "";
}

} // namespace

TEST_CASE("a valid scenario parses into its fields") {
    ScenarioFile sc = ScenarioFile::parse(kBallScenario);
    CHECK(sc.dimension == 2);
    CHECK(sc.pursuer.model.kind() == ModelKind::BoundedSpeed);
    CHECK(sc.pursuer.model.bounded_speed().v_max == 2.0);
    CHECK(sc.evader.position[0] == 1.0);
    CHECK(sc.t_start == 0.5);
    CHECK(sc.n_leaves == 4);
    CHECK(sc.capture_radius == 0.1);
    CHECK(sc.seed == 7);
    CHECK(!sc.arena_radius);

    EngagementConfig c = sc.engagement_config();
    CHECK(c.t_max == 5.0);
    CHECK(c.planner.horizon_end == 2.0);
    CHECK(c.planner.n_leaves == 4);
}

TEST_CASE("scenario serialization round-trips exactly") {
    ScenarioFile sc = ScenarioFile::parse(kBallScenario);
    ScenarioFile again = ScenarioFile::parse(sc.to_json().dump());
    CHECK(sc.to_json().dump() == again.to_json().dump());

    // optional fields survive the trip too
    ScenarioFile rich = sc;
    rich.dimension = 2;
    rich.pursuer.model = DynamicsModel::make_dubins(1.0, 0.5);
    rich.pursuer.heading = 0.25;
    rich.evader.model = DynamicsModel::make_double_integrator(0.8, 0.3);
    rich.evader.velocity = Vec(0.1, -0.2);
    rich.arena_radius = 10.0;
    ScenarioFile back = ScenarioFile::parse(rich.to_json().dump());
    CHECK(rich.to_json().dump() == back.to_json().dump());
    CHECK(back.pursuer.model.kind() == ModelKind::Dubins);
    CHECK(back.evader.model.double_integrator().dv_budget.has_value());
}

TEST_CASE("unknown keys are rejected with their path") {
    nlohmann::json j = nlohmann::json::parse(kBallScenario);
    j["extra"] = 1;
    std::string msg = expect_schema_error(j.dump());
    CHECK(msg.find("scenario.extra") != std::string::npos);

    j = nlohmann::json::parse(kBallScenario);
    j["pursuer"]["params"]["vmax"] = 2.0;
    msg = expect_schema_error(j.dump());
    CHECK(msg.find("scenario.pursuer.params.vmax") != std::string::npos);
}

TEST_CASE("missing and ill-typed fields are rejected") {
    nlohmann::json j = nlohmann::json::parse(kBallScenario);
    j.erase("window");
    expect_schema_error(j.dump());

    j = nlohmann::json::parse(kBallScenario);
    j["window"]["t_start"] = "soon";
    expect_schema_error(j.dump());

    j = nlohmann::json::parse(kBallScenario);
    j["evader"]["position"] = {1.0};
    std::string msg = expect_schema_error(j.dump());
    CHECK(msg.find("position") != std::string::npos);

    expect_schema_error("{ not json");
}

TEST_CASE("semantic invariants are enforced at parse time") {
    nlohmann::json j = nlohmann::json::parse(kBallScenario);
    j["engagement"]["dt"] = 10.0; // dt > t_max
    expect_schema_error(j.dump());

    j = nlohmann::json::parse(kBallScenario);
    j["engagement"]["capture_radius"] = -1.0;
    expect_schema_error(j.dump());

    j = nlohmann::json::parse(kBallScenario);
    j["window"]["t_end"] = 0.5; // equal to t_start
    expect_schema_error(j.dump());

    j = nlohmann::json::parse(kBallScenario);
    j["pursuer"]["params"]["v_max"] = 0.0;
    expect_schema_error(j.dump());

    j = nlohmann::json::parse(kBallScenario);
    j["dimension"] = 3;
    j["pursuer"] = {{"model", "dubins"},
                    {"params", {{"speed", 1.0}, {"r_min", 1.0}}},
                    {"position", {0.0, 0.0, 0.0}}};
    std::string msg = expect_schema_error(j.dump());
    CHECK(msg.find("dubins") != std::string::npos);
}

TEST_CASE("cone CSV rows carry the exact analytic radii") {
    ScenarioFile sc = ScenarioFile::parse(kBallScenario);
    FutureCone cone = sc.player_cone(true, ConeOptions{});
    std::ostringstream os;
    write_cone_csv(os, cone);
    std::istringstream in(os.str());

    std::string header;
    std::getline(in, header);
    CHECK(header == "time,point_index,px,py");

    // max radius per leaf time must equal v_max * t to 1e-9
    std::map<double, double> max_radius;
    std::string line;
    while (std::getline(in, line)) {
        double t, px, py;
        int idx;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%d,%lf,%lf", &t, &idx, &px, &py) == 4);
        double r = std::hypot(px, py);
        max_radius[t] = std::max(max_radius[t], r);
    }
    REQUIRE(max_radius.size() == 4);
    for (const auto& [t, r] : max_radius) CHECK(std::abs(r - 2.0 * t) <= 1e-9);
}

TEST_CASE("three-dimensional cone CSV carries the pz column") {
    nlohmann::json j = nlohmann::json::parse(kBallScenario);
    j["dimension"] = 3;
    j["pursuer"]["position"] = {0.0, 0.0, 0.0};
    j["evader"]["position"] = {1.0, 0.0, 0.0};
    ScenarioFile sc = ScenarioFile::parse(j.dump());
    FutureCone cone = sc.player_cone(true, ConeOptions{});
    std::ostringstream os;
    write_cone_csv(os, cone);
    std::istringstream in(os.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "time,point_index,px,py,pz");

    std::map<double, double> max_radius;
    std::string line;
    while (std::getline(in, line)) {
        double t, px, py, pz;
        int idx;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%d,%lf,%lf,%lf", &t, &idx, &px, &py, &pz) == 5);
        max_radius[t] = std::max(max_radius[t], Vec(px, py, pz).norm());
    }
    for (const auto& [t, r] : max_radius) CHECK(std::abs(r - 2.0 * t) <= 1e-9);
}

TEST_CASE("trajectory CSV layout and separation column") {
    ScenarioFile sc = ScenarioFile::parse(kBallScenario);
    Agent pursuer{sc.pursuer.model, sc.pursuer.initial_state(), PurePursuitSpec{}};
    Agent evader{sc.evader.model, sc.evader.initial_state(), StraightLineSpec{Vec(1, 0)}};
    EngagementResult r = simulate(sc.engagement_config(), pursuer, evader);

    std::ostringstream os;
    write_trajectory_csv(os, r);
    std::istringstream in(os.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "time,xp_x,xp_y,xe_x,xe_y,separation");

    std::string line;
    size_t rows = 0;
    while (std::getline(in, line)) {
        double t, ax, ay, bx, by, sep;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &t, &ax, &ay, &bx, &by,
                            &sep) == 6);
        CHECK(sep == doctest::Approx(std::hypot(ax - bx, ay - by)).epsilon(1e-15));
        ++rows;
    }
    CHECK(rows == r.trajectory_x.size());
}

TEST_CASE("seventeen significant digits survive a parse round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 12345.6789012345678, -2.5e-7, 0.9999999999999999}) {
        std::string s = format_g17(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("svg rendering marks both tracks and the capture point") {
    ScenarioFile sc = ScenarioFile::parse(kBallScenario);
    Agent pursuer{sc.pursuer.model, sc.pursuer.initial_state(), PurePursuitSpec{}};
    Agent evader{sc.evader.model, sc.evader.initial_state(), StraightLineSpec{Vec(1, 0)}};
    EngagementResult r = simulate(sc.engagement_config(), pursuer, evader);
    REQUIRE(r.outcome == Outcome::Intercept);

    std::ostringstream os;
    write_engagement_svg(os, r);
    std::string svg = os.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 4);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("<g stroke=") != std::string::npos); // capture cross
}
