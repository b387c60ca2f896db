#include "futurecone/validation.hpp"

#include "futurecone/errors.hpp"
#include "futurecone/parallel.hpp"
#include "futurecone/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace futurecone {

using nlohmann::json;

namespace {

constexpr int kMaxFilterAttempts = 1000;

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.dim; ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from_json(const json& a) {
    if (!a.is_array() || (a.size() != 2 && a.size() != 3))
        throw Error(Errc::SchemaError, "expected a 2- or 3-element position array");
    Vec v = Vec::zero(static_cast<int>(a.size()));
    for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
    return v;
}

json model_to_json(const DynamicsModel& m) {
    json j;
    j["model"] = model_kind_name(m.kind());
    switch (m.kind()) {
        case ModelKind::BoundedSpeed: j["v_max"] = m.bounded_speed().v_max; break;
        case ModelKind::DoubleIntegrator:
            j["a_max"] = m.double_integrator().a_max;
            if (m.double_integrator().dv_budget)
                j["dv_budget"] = *m.double_integrator().dv_budget;
            break;
        case ModelKind::Dubins:
            j["speed"] = m.dubins().speed;
            j["r_min"] = m.dubins().r_min;
            break;
    }
    return j;
}

DynamicsModel model_from_json(const json& j) {
    std::string kind = j.at("model").get<std::string>();
    if (kind == "bounded_speed")
        return DynamicsModel::make_bounded_speed(j.at("v_max").get<double>());
    if (kind == "double_integrator") {
        std::optional<double> budget;
        if (j.contains("dv_budget")) budget = j.at("dv_budget").get<double>();
        return DynamicsModel::make_double_integrator(j.at("a_max").get<double>(), budget);
    }
    if (kind == "dubins")
        return DynamicsModel::make_dubins(j.at("speed").get<double>(), j.at("r_min").get<double>());
    throw Error(Errc::SchemaError, "unknown model kind '" + kind + "'");
}

DynamicsModel sample_model(ModelKind kind, double bound) {
    if (kind == ModelKind::BoundedSpeed) return DynamicsModel::make_bounded_speed(bound);
    return DynamicsModel::make_double_integrator(bound);
}

GameScenario sample_scenario(const ScenarioDistribution& dist, uint64_t scenario_seed) {
    SplitMix64 rng(scenario_seed);
    GameScenario sc;
    sc.pursuer_model = sample_model(dist.model_kind, rng.uniform(dist.pursuer_bound.lo,
                                                                 dist.pursuer_bound.hi));
    sc.evader_model =
        sample_model(dist.model_kind, rng.uniform(dist.evader_bound.lo, dist.evader_bound.hi));
    double d0 = rng.uniform(dist.separation.lo, dist.separation.hi);
    Vec dir = rng.unit_vector(dist.dimension);
    sc.pursuer_position = Vec::zero(dist.dimension);
    sc.evader_position = dir * d0;
    sc.t_start = dist.t_start;
    sc.t_end = dist.t_end;
    sc.n_leaves = dist.n_leaves;
    sc.scenario_seed = scenario_seed;
    return sc;
}

VehicleState state_at_origin_time(const Vec& pos) {
    VehicleState s;
    s.position = pos;
    s.velocity = Vec::zero(pos.dim);
    s.time = 0.0;
    return s;
}

// Containment profile of the scenario's analytic cones over its grid.
ContainmentReport scenario_containment(const GameScenario& sc) {
    FutureCone pursuer = build_cone(sc.pursuer_model, state_at_origin_time(sc.pursuer_position),
                                    sc.t_start, sc.t_end, sc.n_leaves);
    FutureCone evader = build_cone(sc.evader_model, state_at_origin_time(sc.evader_position),
                                   sc.t_start, sc.t_end, sc.n_leaves);
    return cone_contains(pursuer, evader, 0.0);
}

double max_margin(const ContainmentReport& r) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& [t, v] : r.per_time) m = std::max(m, v.margin);
    return m;
}

bool passes_filter(const GameScenario& sc, bool sufficiency, double robust_fraction) {
    double scale = (sc.evader_position - sc.pursuer_position).norm();
    double band = robust_fraction * scale;
    double m = max_margin(scenario_containment(sc));
    return sufficiency ? m >= band : m <= -band;
}

// Deterministic rejection sampling: scenario i draws from its own seed lane
// so scenarios are independent and the suite parallelizes.
GameScenario sample_filtered(const ScenarioDistribution& dist, int index, bool sufficiency,
                             double robust_fraction) {
    for (int attempt = 0; attempt < kMaxFilterAttempts; ++attempt) {
        uint64_t seed = derive_seed(dist.seed, static_cast<uint64_t>(index) * kMaxFilterAttempts +
                                                   static_cast<uint64_t>(attempt));
        GameScenario sc = sample_scenario(dist, seed);
        if (passes_filter(sc, sufficiency, robust_fraction)) return sc;
    }
    throw Error(Errc::UnsatisfiableDistribution,
                "1000 consecutive samples failed the containment filter");
}

std::string outcome_name(const EngagementResult& r) {
    return r.outcome == Outcome::Intercept ? "intercept" : "escape";
}

json failure_to_json(const FailureRecord& f) {
    return json{{"scenario_seed", f.scenario_seed},
                {"policy", f.policy},
                {"scenario", f.scenario},
                {"outcome", f.outcome},
                {"min_separation", f.min_separation}};
}

ValidationReport run_suite(const ScenarioDistribution& dist, int n_scenarios,
                           const std::vector<StrategyKind>& policies, const SuiteConfig& cfg,
                           bool sufficiency) {
    dist.validate();
    if (policies.empty()) throw Error(Errc::EmptyPolicies, "policy list is empty");
    if (n_scenarios < 0) throw Error(Errc::ConfigError, "n_scenarios must be >= 0");

    ValidationReport report;
    report.mode = sufficiency ? "sufficiency" : "necessity";
    report.n_scenarios = n_scenarios;
    report.n_policies_per_scenario = static_cast<int>(policies.size());
    report.master_seed = dist.seed;
    report.non_robust = cfg.robust_fraction <= 0.0;
    report.note = "Finite policy set: results cover the listed policies only, "
                  "not all admissible maneuvers.";
    if (n_scenarios == 0) {
        report.empty = true;
        return report;
    }

    struct Cell {
        bool success = false;
        FailureRecord failure;
    };
    std::vector<Cell> cells(static_cast<size_t>(n_scenarios) * policies.size());

    parallel_for(static_cast<size_t>(n_scenarios), [&](size_t i) {
        GameScenario sc =
            sample_filtered(dist, static_cast<int>(i), sufficiency, cfg.robust_fraction);
        for (size_t p = 0; p < policies.size(); ++p) {
            EngagementResult r = replay_suite_engagement(sc, policies[p], sufficiency, cfg);
            bool success = sufficiency ? r.outcome == Outcome::Intercept
                                       : r.outcome == Outcome::Escape;
            Cell& cell = cells[i * policies.size() + p];
            cell.success = success;
            if (!success)
                cell.failure = FailureRecord{sc.scenario_seed, strategy_name(policies[p]),
                                             sc.descriptor(), outcome_name(r),
                                             r.min_separation};
        }
    });

    for (const Cell& cell : cells) {
        if (cell.success)
            ++report.successes;
        else
            report.failures.push_back(cell.failure);
    }
    int total = n_scenarios * report.n_policies_per_scenario;
    report.success_rate = static_cast<double>(report.successes) / total;
    return report;
}

} // namespace

void ParamRange::validate(const char* what) const {
    if (!(lo > 0.0) || !(hi >= lo))
        throw Error(Errc::ConfigError, std::string(what) + " range must satisfy 0 < lo <= hi");
}

void ScenarioDistribution::validate() const {
    if (dimension != 2 && dimension != 3)
        throw Error(Errc::ConfigError, "dimension must be 2 or 3");
    if (model_kind == ModelKind::Dubins)
        throw Error(Errc::ConfigError,
                    "scenario distributions support bounded_speed and double_integrator");
    pursuer_bound.validate("pursuer bound");
    evader_bound.validate("evader bound");
    separation.validate("separation");
    if (!(t_start > 0.0) || !(t_end > t_start))
        throw Error(Errc::ConfigError, "window must satisfy 0 < t_start < t_end");
    if (n_leaves < 1) throw Error(Errc::ConfigError, "n_leaves must be >= 1");
}

json GameScenario::descriptor() const {
    return json{{"pursuer", model_to_json(pursuer_model)},
                {"evader", model_to_json(evader_model)},
                {"pursuer_position", vec_to_json(pursuer_position)},
                {"evader_position", vec_to_json(evader_position)},
                {"t_start", t_start},
                {"t_end", t_end},
                {"n_leaves", n_leaves},
                {"scenario_seed", scenario_seed}};
}

GameScenario GameScenario::from_descriptor(const json& j) {
    GameScenario sc;
    sc.pursuer_model = model_from_json(j.at("pursuer"));
    sc.evader_model = model_from_json(j.at("evader"));
    sc.pursuer_position = vec_from_json(j.at("pursuer_position"));
    sc.evader_position = vec_from_json(j.at("evader_position"));
    sc.t_start = j.at("t_start").get<double>();
    sc.t_end = j.at("t_end").get<double>();
    sc.n_leaves = j.at("n_leaves").get<int>();
    sc.scenario_seed = j.at("scenario_seed").get<uint64_t>();
    return sc;
}

json ValidationReport::to_json() const {
    json j;
    j["mode"] = mode;
    j["note"] = note;
    j["master_seed"] = master_seed;
    j["n_scenarios"] = n_scenarios;
    j["n_policies_per_scenario"] = n_policies_per_scenario;
    j["successes"] = successes;
    j["failures"] = json::array();
    for (const FailureRecord& f : failures) j["failures"].push_back(failure_to_json(f));
    if (success_rate)
        j["success_rate"] = *success_rate;
    else
        j["success_rate"] = nullptr;
    j["empty"] = empty;
    j["non_robust"] = non_robust;
    return j;
}

EngagementResult replay_suite_engagement(const GameScenario& scenario, const StrategyKind& policy,
                                         bool sufficiency_mode, const SuiteConfig& cfg) {
    EngagementConfig ec;
    ec.dt = cfg.dt;
    ec.t_max = scenario.t_end;
    ec.capture_radius = cfg.capture_radius;
    ec.planner.horizon_end = scenario.t_end;
    // Planner grid at simulation resolution and replans every step: the
    // intercept-time quantization bounds the aim-point lead, which must
    // shrink below the capture radius for the endgame to close.
    ec.planner.n_leaves =
        std::max(scenario.n_leaves, static_cast<int>(std::ceil(scenario.t_end / cfg.dt)));

    Agent pursuer{scenario.pursuer_model, state_at_origin_time(scenario.pursuer_position),
                  LeafPlanPursuitSpec{1}};
    Agent evader{scenario.evader_model, state_at_origin_time(scenario.evader_position),
                 GreedyEscapeSpec{}};
    if (sufficiency_mode)
        evader.strategy = policy; // suite varies the evader
    else
        pursuer.strategy = policy; // suite varies the pursuer

    return simulate(ec, pursuer, evader);
}

ValidationReport validate_sufficiency(const ScenarioDistribution& dist, int n_scenarios,
                                      const std::vector<StrategyKind>& evader_policies,
                                      const SuiteConfig& cfg) {
    return run_suite(dist, n_scenarios, evader_policies, cfg, true);
}

ValidationReport validate_necessity(const ScenarioDistribution& dist, int n_scenarios,
                                    const std::vector<StrategyKind>& pursuit_policies,
                                    const SuiteConfig& cfg) {
    return run_suite(dist, n_scenarios, pursuit_policies, cfg, false);
}

void DecoyScenario::validate() const {
    if (n_interceptors < 1) throw Error(Errc::ConfigError, "need at least one interceptor");
    if (n_targets_real < 1) throw Error(Errc::ConfigError, "need at least one real target");
    if (n_decoys < 0) throw Error(Errc::ConfigError, "n_decoys must be >= 0");
    target_model.validate();
    interceptor_model.validate();
}

json DecoyReport::to_json() const {
    json j;
    j["n_trials"] = n_trials;
    j["interception_rate"] = interception_rate;
    j["all_real_intercepted_rate"] = all_real_intercepted_rate;
    if (real_target_hit_rate)
        j["real_target_hit_rate"] = *real_target_hit_rate;
    else
        j["real_target_hit_rate"] = nullptr;
    j["hit_rate_ci_halfwidth"] = hit_rate_ci_halfwidth;
    j["coverage_shortfall"] = coverage_shortfall;
    j["unengaged_targets_per_trial"] = unengaged_targets_per_trial;
    j["master_seed"] = master_seed;
    return j;
}

namespace {

struct DecoyTrial {
    bool any_interception = false;
    bool all_real_intercepted = false;
    bool single_hit_real = false;
    int unengaged = 0;
};

DecoyTrial run_decoy_trial(const DecoyScenario& sc, const EngagementConfig& config,
                           uint64_t trial_seed) {
    SplitMix64 rng(trial_seed);
    const int n_targets = sc.n_targets_real + sc.n_decoys;

    // Geometry draw, rejected until every interceptor/target pairing admits
    // containment inside the window.
    std::vector<Vec> interceptors(static_cast<size_t>(sc.n_interceptors));
    std::vector<Vec> targets(static_cast<size_t>(n_targets));
    bool feasible = false;
    for (int attempt = 0; attempt < kMaxFilterAttempts && !feasible; ++attempt) {
        for (auto& p : interceptors) {
            double r = 0.2 * std::sqrt(rng.uniform01());
            p = rng.unit_vector(2) * r;
        }
        for (auto& p : targets) {
            double r = rng.uniform(0.6, 1.2);
            p = rng.unit_vector(2) * r;
        }
        feasible = true;
        for (const Vec& ip : interceptors) {
            for (const Vec& tp : targets) {
                GameScenario pair;
                pair.pursuer_model = sc.interceptor_model;
                pair.evader_model = sc.target_model;
                pair.pursuer_position = ip;
                pair.evader_position = tp;
                pair.t_start = config.t_max / 20.0;
                pair.t_end = config.t_max;
                pair.n_leaves = 20;
                if (!passes_filter(pair, true, 0.05)) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) break;
        }
    }
    if (!feasible)
        throw Error(Errc::UnsatisfiableDistribution,
                    "decoy geometry never satisfied pairwise containment");

    // Anonymize: shuffle, then mark which anonymous indices are real.
    std::vector<int> order(static_cast<size_t>(n_targets));
    for (int i = 0; i < n_targets; ++i) order[static_cast<size_t>(i)] = i;
    for (int i = n_targets - 1; i > 0; --i)
        std::swap(order[static_cast<size_t>(i)],
                  order[rng.below(static_cast<uint64_t>(i + 1))]);
    std::vector<bool> is_real(static_cast<size_t>(n_targets));
    for (int i = 0; i < n_targets; ++i)
        is_real[static_cast<size_t>(order[static_cast<size_t>(i)])] = i < sc.n_targets_real;

    // Assignment sees positions only.
    std::vector<int> assigned(static_cast<size_t>(sc.n_interceptors));
    for (int k = 0; k < sc.n_interceptors; ++k) {
        if (sc.assignment == AssignmentPolicy::UniformRandom)
            assigned[static_cast<size_t>(k)] =
                static_cast<int>(rng.below(static_cast<uint64_t>(n_targets)));
        else
            assigned[static_cast<size_t>(k)] = k % n_targets;
    }

    std::vector<bool> intercepted(static_cast<size_t>(n_targets), false);
    std::vector<bool> engaged(static_cast<size_t>(n_targets), false);
    DecoyTrial trial;
    for (int k = 0; k < sc.n_interceptors; ++k) {
        int t = assigned[static_cast<size_t>(k)];
        engaged[static_cast<size_t>(t)] = true;
        Agent pursuer{sc.interceptor_model,
                      state_at_origin_time(interceptors[static_cast<size_t>(k)]),
                      PurePursuitSpec{}};
        Agent evader{sc.target_model, state_at_origin_time(targets[static_cast<size_t>(t)]),
                     GreedyEscapeSpec{}};
        EngagementResult r = simulate(config, pursuer, evader);
        if (r.outcome == Outcome::Intercept) {
            trial.any_interception = true;
            intercepted[static_cast<size_t>(t)] = true;
        }
    }

    trial.all_real_intercepted = true;
    for (int t = 0; t < n_targets; ++t) {
        if (is_real[static_cast<size_t>(t)] && !intercepted[static_cast<size_t>(t)])
            trial.all_real_intercepted = false;
        if (!engaged[static_cast<size_t>(t)]) ++trial.unengaged;
    }
    if (sc.n_interceptors == 1) {
        int t = assigned[0];
        trial.single_hit_real = is_real[static_cast<size_t>(t)] && intercepted[static_cast<size_t>(t)];
    }
    return trial;
}

} // namespace

DecoyReport run_decoy(const DecoyScenario& sc, const EngagementConfig& config, int n_trials) {
    sc.validate();
    config.validate();
    if (n_trials < 1) throw Error(Errc::ConfigError, "n_trials must be >= 1");

    std::vector<DecoyTrial> trials(static_cast<size_t>(n_trials));
    parallel_for(static_cast<size_t>(n_trials), [&](size_t i) {
        trials[i] = run_decoy_trial(sc, config, derive_seed(sc.seed, i));
    });

    DecoyReport report;
    report.n_trials = n_trials;
    report.master_seed = sc.seed;
    int any = 0, all_real = 0, hit_real = 0;
    for (const DecoyTrial& t : trials) {
        any += t.any_interception ? 1 : 0;
        all_real += t.all_real_intercepted ? 1 : 0;
        hit_real += t.single_hit_real ? 1 : 0;
        report.unengaged_targets_per_trial = std::max(report.unengaged_targets_per_trial,
                                                      t.unengaged);
    }
    report.interception_rate = static_cast<double>(any) / n_trials;
    report.all_real_intercepted_rate = static_cast<double>(all_real) / n_trials;
    if (sc.n_interceptors == 1) {
        double p = static_cast<double>(hit_real) / n_trials;
        report.real_target_hit_rate = p;
        report.hit_rate_ci_halfwidth = 3.0 * std::sqrt(std::max(p * (1.0 - p), 1e-12) / n_trials);
    }
    report.coverage_shortfall = report.unengaged_targets_per_trial > 0 &&
                                sc.assignment == AssignmentPolicy::OnePerTarget;
    return report;
}

} // namespace futurecone
