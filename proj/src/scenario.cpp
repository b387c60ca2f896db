#include "futurecone/scenario.hpp"

#include "futurecone/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace futurecone {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw Error(Errc::SchemaError, path + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) schema_fail(path + "." + key, "unknown key");
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) schema_fail(path + "." + key, "missing required field");
    return obj.at(key);
}

double require_number(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) schema_fail(path + "." + key, "expected a number");
    return v.get<double>();
}

int require_int(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number_integer()) schema_fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

Vec parse_vec(const json& v, const std::string& path, int dim) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
        schema_fail(path, "expected an array of " + std::to_string(dim) + " numbers");
    Vec out = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) {
        if (!v[static_cast<size_t>(i)].is_number())
            schema_fail(path + "[" + std::to_string(i) + "]", "expected a number");
        out[i] = v[static_cast<size_t>(i)].get<double>();
    }
    if (!out.finite()) schema_fail(path, "components must be finite");
    return out;
}

DynamicsModel parse_model(const json& player, const std::string& path, int dim) {
    const json& kind_field = require(player, path, "model");
    if (!kind_field.is_string()) schema_fail(path + ".model", "expected a string");
    std::string kind = kind_field.get<std::string>();
    const json& params = require(player, path, "params");
    if (!params.is_object()) schema_fail(path + ".params", "expected an object");
    const std::string ppath = path + ".params";

    if (kind == "bounded_speed") {
        reject_unknown_keys(params, ppath, {"v_max"});
        double v_max = require_number(params, ppath, "v_max");
        if (!(v_max > 0.0)) schema_fail(ppath + ".v_max", "must be > 0");
        return DynamicsModel::make_bounded_speed(v_max);
    }
    if (kind == "double_integrator") {
        reject_unknown_keys(params, ppath, {"a_max", "dv_budget"});
        double a_max = require_number(params, ppath, "a_max");
        if (!(a_max > 0.0)) schema_fail(ppath + ".a_max", "must be > 0");
        std::optional<double> budget;
        if (params.contains("dv_budget")) {
            if (!params.at("dv_budget").is_number())
                schema_fail(ppath + ".dv_budget", "expected a number");
            budget = params.at("dv_budget").get<double>();
            if (!(*budget >= 0.0)) schema_fail(ppath + ".dv_budget", "must be >= 0");
        }
        return DynamicsModel::make_double_integrator(a_max, budget);
    }
    if (kind == "dubins") {
        if (dim != 2) schema_fail(path + ".model", "dubins requires dimension 2");
        reject_unknown_keys(params, ppath, {"speed", "r_min"});
        double speed = require_number(params, ppath, "speed");
        double r_min = require_number(params, ppath, "r_min");
        if (!(speed > 0.0)) schema_fail(ppath + ".speed", "must be > 0");
        if (!(r_min > 0.0)) schema_fail(ppath + ".r_min", "must be > 0");
        return DynamicsModel::make_dubins(speed, r_min);
    }
    schema_fail(path + ".model", "unknown model '" + kind + "'");
}

PlayerSpec parse_player(const json& j, const std::string& path, int dim) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    reject_unknown_keys(j, path, {"model", "params", "position", "velocity", "heading"});
    PlayerSpec p;
    p.model = parse_model(j, path, dim);
    p.position = parse_vec(require(j, path, "position"), path + ".position", dim);
    if (j.contains("velocity"))
        p.velocity = parse_vec(j.at("velocity"), path + ".velocity", dim);
    if (j.contains("heading")) {
        if (!j.at("heading").is_number()) schema_fail(path + ".heading", "expected a number");
        p.heading = j.at("heading").get<double>();
    }
    return p;
}

json model_json(const DynamicsModel& m) {
    json params = json::object();
    std::string kind = model_kind_name(m.kind());
    switch (m.kind()) {
        case ModelKind::BoundedSpeed: params["v_max"] = m.bounded_speed().v_max; break;
        case ModelKind::DoubleIntegrator:
            params["a_max"] = m.double_integrator().a_max;
            if (m.double_integrator().dv_budget)
                params["dv_budget"] = *m.double_integrator().dv_budget;
            break;
        case ModelKind::Dubins:
            params["speed"] = m.dubins().speed;
            params["r_min"] = m.dubins().r_min;
            break;
    }
    return json{{"model", kind}, {"params", params}};
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.dim; ++i) a.push_back(v[i]);
    return a;
}

} // namespace

VehicleState PlayerSpec::initial_state() const {
    VehicleState s;
    s.position = position;
    s.velocity = velocity.value_or(Vec::zero(position.dim));
    s.heading = heading.value_or(0.0);
    s.time = 0.0;
    return s;
}

ScenarioFile ScenarioFile::parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::SchemaError, std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) schema_fail("scenario", "top level must be an object");
    reject_unknown_keys(j, "scenario",
                        {"dimension", "pursuer", "evader", "window", "engagement", "seed"});

    ScenarioFile sc;
    sc.dimension = require_int(j, "scenario", "dimension");
    if (sc.dimension != 2 && sc.dimension != 3)
        schema_fail("scenario.dimension", "must be 2 or 3");

    sc.pursuer = parse_player(require(j, "scenario", "pursuer"), "scenario.pursuer", sc.dimension);
    sc.evader = parse_player(require(j, "scenario", "evader"), "scenario.evader", sc.dimension);

    const json& window = require(j, "scenario", "window");
    if (!window.is_object()) schema_fail("scenario.window", "expected an object");
    reject_unknown_keys(window, "scenario.window", {"t_start", "t_end", "n_leaves"});
    sc.t_start = require_number(window, "scenario.window", "t_start");
    sc.t_end = require_number(window, "scenario.window", "t_end");
    sc.n_leaves = require_int(window, "scenario.window", "n_leaves");
    if (!(sc.t_start > 0.0)) schema_fail("scenario.window.t_start", "must be > 0");
    if (!(sc.t_end > sc.t_start)) schema_fail("scenario.window.t_end", "must exceed t_start");
    if (sc.n_leaves < 1) schema_fail("scenario.window.n_leaves", "must be >= 1");

    const json& eng = require(j, "scenario", "engagement");
    if (!eng.is_object()) schema_fail("scenario.engagement", "expected an object");
    reject_unknown_keys(eng, "scenario.engagement",
                        {"dt", "t_max", "capture_radius", "arena_radius"});
    sc.dt = require_number(eng, "scenario.engagement", "dt");
    sc.t_max = require_number(eng, "scenario.engagement", "t_max");
    sc.capture_radius = require_number(eng, "scenario.engagement", "capture_radius");
    if (eng.contains("arena_radius")) {
        if (!eng.at("arena_radius").is_number())
            schema_fail("scenario.engagement.arena_radius", "expected a number");
        sc.arena_radius = eng.at("arena_radius").get<double>();
        if (!(*sc.arena_radius > 0.0))
            schema_fail("scenario.engagement.arena_radius", "must be > 0");
    }
    if (!(sc.dt > 0.0)) schema_fail("scenario.engagement.dt", "must be > 0");
    if (!(sc.t_max > 0.0)) schema_fail("scenario.engagement.t_max", "must be > 0");
    if (sc.dt > sc.t_max) schema_fail("scenario.engagement.dt", "must not exceed t_max");
    if (!(sc.capture_radius >= 0.0))
        schema_fail("scenario.engagement.capture_radius", "must be >= 0");

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) schema_fail("scenario.seed", "expected an integer");
        sc.seed = j.at("seed").get<uint64_t>();
    }
    return sc;
}

ScenarioFile ScenarioFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::SchemaError, "cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

json ScenarioFile::to_json() const {
    auto player_json = [](const PlayerSpec& p) {
        json j = model_json(p.model);
        j["position"] = vec_json(p.position);
        if (p.velocity) j["velocity"] = vec_json(*p.velocity);
        if (p.heading) j["heading"] = *p.heading;
        return j;
    };
    json eng{{"dt", dt}, {"t_max", t_max}, {"capture_radius", capture_radius}};
    if (arena_radius) eng["arena_radius"] = *arena_radius;
    return json{{"dimension", dimension},
                {"pursuer", player_json(pursuer)},
                {"evader", player_json(evader)},
                {"window", json{{"t_start", t_start}, {"t_end", t_end}, {"n_leaves", n_leaves}}},
                {"engagement", eng},
                {"seed", seed}};
}

EngagementConfig ScenarioFile::engagement_config() const {
    EngagementConfig c;
    c.dt = dt;
    c.t_max = t_max;
    c.capture_radius = capture_radius;
    c.arena_radius = arena_radius;
    c.planner.horizon_end = t_end;
    c.planner.n_leaves = n_leaves;
    return c;
}

FutureCone ScenarioFile::player_cone(bool pursuer_side, const ConeOptions& opts) const {
    const PlayerSpec& p = pursuer_side ? pursuer : evader;
    return build_cone(p.model, p.initial_state(), t_start, t_end, n_leaves, opts);
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_point_row(std::ostream& os, double t, int index, const Vec& p) {
    os << format_g17(t) << ',' << index;
    for (int i = 0; i < p.dim; ++i) os << ',' << format_g17(p[i]);
    os << '\n';
}

// Dense boundary ring of a ball leaf for CSV output.
std::vector<Vec> ball_boundary(const Ball& b) {
    std::vector<Vec> pts;
    if (b.center.dim == 2) {
        constexpr int n = 64;
        pts.reserve(n);
        for (int k = 0; k < n; ++k) {
            double a = 6.2831853071795864769 * k / n;
            pts.push_back(b.center + Vec(b.radius * std::cos(a), b.radius * std::sin(a)));
        }
    } else {
        constexpr int n = 256;
        pts.reserve(n);
        for (int k = 0; k < n; ++k) {
            double z = 1.0 - 2.0 * (k + 0.5) / n;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double phi = 6.2831853071795864769 * k * 0.6180339887498948482;
            pts.push_back(b.center + Vec(b.radius * r * std::cos(phi),
                                         b.radius * r * std::sin(phi), b.radius * z));
        }
    }
    return pts;
}

} // namespace

void write_cone_csv(std::ostream& os, const FutureCone& cone) {
    int dim = cone.vertex.dim();
    os << "time,point_index,px,py" << (dim == 3 ? ",pz" : "") << '\n';
    for (const Leaf& leaf : cone.leaves) {
        if (leaf.is_ball()) {
            int idx = 0;
            for (const Vec& p : ball_boundary(leaf.ball())) write_point_row(os, leaf.time, idx++, p);
        } else {
            int idx = 0;
            for (const Vec& p : leaf.cloud().points) write_point_row(os, leaf.time, idx++, p);
        }
    }
}

void write_trajectory_csv(std::ostream& os, const EngagementResult& result) {
    if (result.trajectory_x.empty()) throw Error(Errc::EmptyTrajectory, "nothing to write");
    int dim = result.trajectory_x.front().second.dim;
    if (dim == 3)
        os << "time,xp_x,xp_y,xp_z,xe_x,xe_y,xe_z,separation\n";
    else
        os << "time,xp_x,xp_y,xe_x,xe_y,separation\n";
    for (size_t i = 0; i < result.trajectory_x.size(); ++i) {
        const auto& [t, xp] = result.trajectory_x[i];
        const Vec& xe = result.trajectory_y[i].second;
        os << format_g17(t);
        for (int k = 0; k < dim; ++k) os << ',' << format_g17(xp[k]);
        for (int k = 0; k < dim; ++k) os << ',' << format_g17(xe[k]);
        os << ',' << format_g17((xp - xe).norm()) << '\n';
    }
}

void write_engagement_svg(std::ostream& os, const EngagementResult& result) {
    if (result.trajectory_x.empty()) throw Error(Errc::EmptyTrajectory, "nothing to draw");

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto grow = [&](const Vec& p) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    };
    for (const auto& [t, p] : result.trajectory_x) grow(p);
    for (const auto& [t, p] : result.trajectory_y) grow(p);
    double span = std::max({xmax - xmin, ymax - ymin, 1e-6});
    double pad = 0.08 * span;
    xmin -= pad;
    ymin -= pad;
    span += 2 * pad;
    const double view = 640.0;
    auto sx = [&](double x) { return (x - xmin) / span * view; };
    auto sy = [&](double y) { return view - (y - ymin) / span * view; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
          "viewBox=\"0 0 640 640\">\n";
    os << "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
    auto polyline = [&](const std::vector<std::pair<double, Vec>>& traj, const char* color) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [t, p] : traj) os << sx(p[0]) << ',' << sy(p[1]) << ' ';
        os << "\"/>\n";
    };
    polyline(result.trajectory_x, "#c0392b");
    polyline(result.trajectory_y, "#2980b9");
    auto marker = [&](const Vec& p, const char* color) {
        os << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1]) << "\" r=\"5\" fill=\""
           << color << "\"/>\n";
    };
    marker(result.trajectory_x.front().second, "#c0392b");
    marker(result.trajectory_y.front().second, "#2980b9");
    if (result.outcome == Outcome::Intercept) {
        const Vec& hit = result.trajectory_x.back().second;
        os << "<g stroke=\"black\" stroke-width=\"2\">"
           << "<line x1=\"" << sx(hit[0]) - 6 << "\" y1=\"" << sy(hit[1]) - 6 << "\" x2=\""
           << sx(hit[0]) + 6 << "\" y2=\"" << sy(hit[1]) + 6 << "\"/>"
           << "<line x1=\"" << sx(hit[0]) - 6 << "\" y1=\"" << sy(hit[1]) + 6 << "\" x2=\""
           << sx(hit[0]) + 6 << "\" y2=\"" << sy(hit[1]) - 6 << "\"/></g>\n";
    }
    os << "</svg>\n";
}

} // namespace futurecone
