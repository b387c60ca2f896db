// futurecone — future-cone construction, containment checking, pursuit/
// evasion simulation and Monte Carlo validation from scenario files.
//
// Exit codes: 0 success/affirmative, 1 negative verdict, 2 usage or config
// error, 3 capability error (e.g. analytic leaves requested for a model
// without them).

#include "futurecone/errors.hpp"
#include "futurecone/scenario.hpp"
#include "futurecone/strategies.hpp"
#include "futurecone/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace fc = futurecone;
using nlohmann::json;

namespace {

constexpr int kExitAffirmative = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapability = 3;

int exit_code_for(const fc::Error& e) {
    switch (e.code()) {
        case fc::Errc::UnsupportedAnalytic: return kExitCapability;
        default: return kExitUsage;
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw fc::Error(fc::Errc::ConfigError, "cannot open output file '" + path + "'");
    return os;
}

json verdict_json(const fc::ContainmentReport& report) {
    json per_time = json::array();
    for (const auto& [t, v] : report.per_time)
        per_time.push_back(json{{"time", t},
                                {"contained", v.contained},
                                {"margin", v.margin},
                                {"approximate", v.approximate}});
    json j;
    j["per_time"] = per_time;
    j["first_containment_time"] =
        report.first_containment_time ? json(*report.first_containment_time) : json(nullptr);
    j["window"] = report.window ? json{report.window->first, report.window->second}
                                : json(nullptr);
    j["approximate"] = report.approximate;
    return j;
}

json outcome_json(const fc::EngagementResult& result) {
    json j;
    j["outcome"] = result.outcome == fc::Outcome::Intercept ? "intercept" : "escape";
    if (result.intercept_time) j["t"] = *result.intercept_time;
    j["min_separation"] = result.min_separation;
    j["min_separation_time"] = result.min_separation_time;
    return j;
}

fc::ConeOptions cone_options_for(const std::string& method, int n_controls, int n_switches,
                                 bool fallback) {
    fc::ConeOptions opts;
    opts.n_controls = n_controls;
    opts.n_switches = n_switches;
    if (method == "sampled") {
        opts.method = fc::LeafMethod::Sampled;
    } else {
        opts.method = fc::LeafMethod::Analytic;
        opts.analytic_fallback = fallback;
    }
    return opts;
}

int cmd_cone(const std::string& scenario_path, const std::string& player,
             const std::string& method, int n_controls, int n_switches,
             const std::string& out_path) {
    fc::ScenarioFile sc = fc::ScenarioFile::load(scenario_path);
    fc::FutureCone cone =
        sc.player_cone(player == "x", cone_options_for(method, n_controls, n_switches, false));
    if (out_path.empty()) {
        fc::write_cone_csv(std::cout, cone);
    } else {
        auto os = open_out(out_path);
        fc::write_cone_csv(os, cone);
    }
    return kExitAffirmative;
}

int cmd_check(const std::string& scenario_path, double tol, const std::string& method,
              int n_controls, int n_switches, const std::string& json_path) {
    if (tol < 0.0) throw fc::Error(fc::Errc::ConfigError, "--tol must be >= 0");
    fc::ScenarioFile sc = fc::ScenarioFile::load(scenario_path);
    fc::ConeOptions opts = cone_options_for(method, n_controls, n_switches, true);
    fc::FutureCone pursuer = sc.player_cone(true, opts);
    fc::FutureCone evader = sc.player_cone(false, opts);
    fc::ContainmentReport report = fc::cone_contains(pursuer, evader, tol);

    json j = verdict_json(report);
    std::cout << j.dump() << '\n';
    if (!json_path.empty()) {
        auto os = open_out(json_path);
        os << j.dump(2) << '\n';
    }
    return report.any_contained() ? kExitAffirmative : kExitNegative;
}

int cmd_simulate(const std::string& scenario_path, const std::string& pursuit,
                 const std::string& evade, const std::string& traj_path,
                 const std::string& svg_path) {
    fc::ScenarioFile sc = fc::ScenarioFile::load(scenario_path);
    fc::Agent pursuer{sc.pursuer.model, sc.pursuer.initial_state(),
                      fc::strategy_from_name(pursuit)};
    fc::Agent evader{sc.evader.model, sc.evader.initial_state(), fc::strategy_from_name(evade)};
    if (auto* rm = std::get_if<fc::RandomManeuverSpec>(&evader.strategy)) rm->seed = sc.seed;

    fc::EngagementResult result = fc::simulate(sc.engagement_config(), pursuer, evader);

    std::cout << outcome_json(result).dump() << '\n';
    if (!traj_path.empty()) {
        auto os = open_out(traj_path);
        fc::write_trajectory_csv(os, result);
    }
    if (!svg_path.empty()) {
        if (sc.dimension != 2)
            throw fc::Error(fc::Errc::ConfigError, "--svg renders 2-D scenarios only");
        auto os = open_out(svg_path);
        fc::write_engagement_svg(os, result);
    }
    return result.outcome == fc::Outcome::Intercept ? kExitAffirmative : kExitNegative;
}

int cmd_validate(const std::string& mode, int n, uint64_t seed, const std::string& json_path,
                 int interceptors, int real, int decoys, const std::string& assignment) {
    json j;
    bool affirmative = false;

    if (mode == "sufficiency" || mode == "necessity") {
        fc::ScenarioDistribution dist;
        dist.seed = seed;
        fc::SuiteConfig cfg;
        fc::ValidationReport report;
        if (mode == "sufficiency") {
            dist.pursuer_bound = {2.0, 2.0};
            dist.evader_bound = {1.0, 1.0};
            dist.separation = {0.2, 1.0};
            std::vector<fc::StrategyKind> evaders{
                fc::StraightLineSpec{}, fc::GreedyEscapeSpec{}, fc::RandomManeuverSpec{11, 0.5},
                fc::RandomManeuverSpec{23, 0.5}, fc::RandomManeuverSpec{37, 0.5}};
            report = fc::validate_sufficiency(dist, n, evaders, cfg);
        } else {
            dist.pursuer_bound = {1.0, 1.0};
            dist.evader_bound = {2.0, 2.0};
            dist.separation = {1.0, 2.0};
            std::vector<fc::StrategyKind> pursuers{fc::PurePursuitSpec{},
                                                   fc::LeafPlanPursuitSpec{}};
            report = fc::validate_necessity(dist, n, pursuers, cfg);
        }
        j = report.to_json();
        affirmative = report.success_rate && *report.success_rate == 1.0;
    } else if (mode == "decoy") {
        fc::DecoyScenario sc;
        sc.n_interceptors = interceptors;
        sc.n_targets_real = real;
        sc.n_decoys = decoys;
        sc.seed = seed;
        if (assignment == "one-per-target")
            sc.assignment = fc::AssignmentPolicy::OnePerTarget;
        else if (assignment != "uniform-random")
            throw fc::Error(fc::Errc::ConfigError, "unknown assignment '" + assignment + "'");
        fc::EngagementConfig config;
        config.t_max = 5.0;
        fc::DecoyReport report = fc::run_decoy(sc, config, n);
        j = report.to_json();
        bool full_coverage = sc.n_interceptors >= sc.n_targets_real + sc.n_decoys &&
                             sc.assignment == fc::AssignmentPolicy::OnePerTarget;
        affirmative = report.interception_rate == 1.0 &&
                      (!full_coverage || report.all_real_intercepted_rate == 1.0) &&
                      !report.coverage_shortfall;
    } else {
        throw fc::Error(fc::Errc::ConfigError, "unknown mode '" + mode + "'");
    }

    std::cout << j.dump() << '\n';
    if (!json_path.empty()) {
        auto os = open_out(json_path);
        os << j.dump(2) << '\n';
    }
    return affirmative ? kExitAffirmative : kExitNegative;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"future-cone toolkit: reachable-set construction, containment "
                 "verdicts and pursuit/evasion experiments"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, json_path, traj_path, svg_path;
    std::string player = "x", method = "analytic", pursuit = "leafplan", evade = "greedy";
    std::string mode = "sufficiency", assignment = "uniform-random";
    double tol = 0.0;
    int n_controls = 1000, n_switches = 2, n = 100;
    int interceptors = 1, real = 1, decoys = 2;
    uint64_t seed = 7;

    CLI::App* cone = app.add_subcommand("cone", "write a player's cone leaves as CSV");
    cone->add_option("scenario", scenario_path, "scenario JSON file")->required();
    cone->add_option("--player", player, "x (pursuer) or y (evader)")
        ->check(CLI::IsMember({"x", "y"}));
    cone->add_option("--method", method, "analytic or sampled")
        ->check(CLI::IsMember({"analytic", "sampled"}));
    cone->add_option("--controls", n_controls, "sampled leaf control count");
    cone->add_option("--switches", n_switches, "sampled leaf switch count");
    cone->add_option("--out", out_path, "CSV output path (stdout when omitted)");

    CLI::App* check = app.add_subcommand("check", "decide cone containment (pursuer over evader)");
    check->add_option("scenario", scenario_path, "scenario JSON file")->required();
    check->add_option("--tol", tol, "containment tolerance in meters");
    check->add_option("--method", method, "analytic (with sampled fallback) or sampled")
        ->check(CLI::IsMember({"analytic", "sampled"}));
    check->add_option("--controls", n_controls, "sampled leaf control count");
    check->add_option("--switches", n_switches, "sampled leaf switch count");
    check->add_option("--json", json_path, "write the report JSON here");

    CLI::App* sim = app.add_subcommand("simulate", "run one closed-loop engagement");
    sim->add_option("scenario", scenario_path, "scenario JSON file")->required();
    sim->add_option("--pursuit", pursuit, "pure | leafplan")
        ->check(CLI::IsMember({"pure", "pure_pursuit", "leafplan", "leaf_plan_pursuit"}));
    sim->add_option("--evade", evade, "straight | greedy | random")
        ->check(CLI::IsMember(
            {"straight", "straight_line", "greedy", "greedy_escape", "random",
             "random_maneuver"}));
    sim->add_option("--traj", traj_path, "trajectory CSV output path");
    sim->add_option("--svg", svg_path, "2-D engagement picture output path");

    CLI::App* val = app.add_subcommand("validate", "run a Monte Carlo suite");
    val->add_option("--mode", mode, "sufficiency | necessity | decoy");
    val->add_option("--n", n, "scenario or trial count");
    val->add_option("--seed", seed, "master seed");
    val->add_option("--json", json_path, "write the report JSON here");
    val->add_option("--interceptors", interceptors, "decoy mode: interceptor count");
    val->add_option("--real", real, "decoy mode: real target count");
    val->add_option("--decoys", decoys, "decoy mode: decoy count");
    val->add_option("--assignment", assignment, "decoy mode: uniform-random | one-per-target");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand(cone))
            return cmd_cone(scenario_path, player, method, n_controls, n_switches, out_path);
        if (app.got_subcommand(check))
            return cmd_check(scenario_path, tol, method, n_controls, n_switches, json_path);
        if (app.got_subcommand(sim))
            return cmd_simulate(scenario_path, pursuit, evade, traj_path, svg_path);
        return cmd_validate(mode, n, seed, json_path, interceptors, real, decoys, assignment);
    } catch (const fc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitUsage;
    }
}
