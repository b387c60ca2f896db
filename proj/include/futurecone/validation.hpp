#pragma once

#include "futurecone/engagement.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace futurecone {

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;

    void validate(const char* what) const;
};

/// Experiment design for the Monte Carlo suites. Pursuer sits at the
/// origin; the evader is placed at a random direction and separation.
/// BoundedSpeed and the unbudgeted DoubleIntegrator are supported (the
/// suites rely on analytic leaves for cheap containment filtering).
struct ScenarioDistribution {
    int dimension = 2;
    ModelKind model_kind = ModelKind::BoundedSpeed;
    ParamRange pursuer_bound{1.8, 2.2}; // v_max or a_max
    ParamRange evader_bound{0.6, 1.0};
    ParamRange separation{0.4, 1.2};
    double t_start = 0.25;
    double t_end = 5.0;
    int n_leaves = 20;
    uint64_t seed = 1;

    void validate() const;
};

/// One concrete sampled game, replayable from its descriptor.
struct GameScenario {
    DynamicsModel pursuer_model{BoundedSpeedModel{1.0}};
    DynamicsModel evader_model{BoundedSpeedModel{1.0}};
    Vec pursuer_position;
    Vec evader_position;
    double t_start = 0.25;
    double t_end = 5.0;
    int n_leaves = 20;
    uint64_t scenario_seed = 0;

    nlohmann::json descriptor() const;
    static GameScenario from_descriptor(const nlohmann::json& j);
};

struct FailureRecord {
    uint64_t scenario_seed = 0;
    std::string policy;
    nlohmann::json scenario; // full descriptor, replayable
    std::string outcome;
    double min_separation = 0.0;
};

struct ValidationReport {
    std::string mode;
    int n_scenarios = 0;
    int n_policies_per_scenario = 0;
    int successes = 0;
    std::vector<FailureRecord> failures;
    std::optional<double> success_rate; // absent when the run is empty
    bool empty = false;
    bool non_robust = false; // margin filter ran with zero robustness band
    std::string note;
    uint64_t master_seed = 0;

    nlohmann::json to_json() const;
};

struct SuiteConfig {
    double dt = 0.01;
    double capture_radius = 0.01;
    /// Margin filter band as a fraction of the initial separation; 0 admits
    /// boundary cases and marks the report non-robust.
    double robust_fraction = 0.05;
};

/// Samples scenarios that pass the containment filter (containment achieved
/// somewhere in the window with robust margin), runs LeafPlanPursuit against
/// each evader policy, and reports capture rates with replayable
/// counterexamples. Throws EmptyPolicies / UnsatisfiableDistribution.
ValidationReport validate_sufficiency(const ScenarioDistribution& dist, int n_scenarios,
                                      const std::vector<StrategyKind>& evader_policies,
                                      const SuiteConfig& cfg = {});

/// Dual suite: scenarios where containment fails at every grid time (margins
/// below the robust band); the evader plays GreedyEscape against each
/// pursuit policy and success means Escape.
ValidationReport validate_necessity(const ScenarioDistribution& dist, int n_scenarios,
                                    const std::vector<StrategyKind>& pursuit_policies,
                                    const SuiteConfig& cfg = {});

/// Replays one suite engagement exactly as the report ran it.
EngagementResult replay_suite_engagement(const GameScenario& scenario,
                                         const StrategyKind& policy, bool sufficiency_mode,
                                         const SuiteConfig& cfg);

enum class AssignmentPolicy { UniformRandom, OnePerTarget };

/// One interceptor force against indistinguishable real targets and decoys.
/// Interceptors see positions only; identities never reach the assignment.
struct DecoyScenario {
    int n_interceptors = 1;
    int n_targets_real = 1;
    int n_decoys = 2;
    DynamicsModel target_model{BoundedSpeedModel{1.0}};      // shared by real + decoys
    DynamicsModel interceptor_model{BoundedSpeedModel{2.0}};
    AssignmentPolicy assignment = AssignmentPolicy::UniformRandom;
    uint64_t seed = 1;

    void validate() const;
};

struct DecoyReport {
    int n_trials = 0;
    /// Fraction of trials where at least one interception occurred.
    double interception_rate = 0.0;
    /// Fraction of trials where every real target was intercepted.
    double all_real_intercepted_rate = 0.0;
    /// Single-interceptor case: fraction of trials hitting a real target.
    std::optional<double> real_target_hit_rate;
    double hit_rate_ci_halfwidth = 0.0; // 3-sigma binomial half width
    bool coverage_shortfall = false;    // some target always unengaged
    int unengaged_targets_per_trial = 0;
    uint64_t master_seed = 0;

    nlohmann::json to_json() const;
};

DecoyReport run_decoy(const DecoyScenario& sc, const EngagementConfig& config, int n_trials);

} // namespace futurecone
