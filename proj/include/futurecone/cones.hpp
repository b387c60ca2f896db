#pragma once

#include "futurecone/dynamics.hpp"
#include "futurecone/geometry.hpp"

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace futurecone {

struct Ball {
    Vec center;
    double radius = 0.0;
};

struct PointCloud {
    std::vector<Vec> points;
    ConvexHull hull;
};

/// One spacelike section of a future cone: the set of positions attainable
/// at exactly one time. Position-only; velocity and heading are quantified
/// out when the leaf is formed.
struct Leaf {
    double time = 0.0;
    std::variant<Ball, PointCloud> set;
    /// True when the underlying reachable set is convex, so that hulls and
    /// balls describe it exactly up to sampling. False for Dubins clouds,
    /// whose leaves can be nonconvex; containment verdicts against such an
    /// outer leaf are flagged approximate.
    bool convex_source = true;

    bool is_ball() const { return std::holds_alternative<Ball>(set); }
    const Ball& ball() const { return std::get<Ball>(set); }
    const PointCloud& cloud() const { return std::get<PointCloud>(set); }
    int dim() const;
};

/// Time-indexed stack of leaves standing in for the set of all spacetime
/// points attainable from the vertex state within [t_start, t_end].
struct FutureCone {
    VehicleState vertex;
    DynamicsModel model;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<Leaf> leaves; // strictly increasing times within [t_start, t_end]

    std::vector<double> leaf_times() const;
    const Leaf* leaf_at(double t, double tol = 1e-9) const;
};

struct ContainmentVerdict {
    bool contained = false;
    /// Signed clearance in meters: >= -tol iff contained. Exact for
    /// ball/ball pairs, sampling-limited for clouds.
    double margin = 0.0;
    /// Verdict relies on a hull of a possibly nonconvex outer set.
    bool approximate = false;
};

struct ContainmentReport {
    std::vector<std::pair<double, ContainmentVerdict>> per_time;
    std::optional<double> first_containment_time;
    /// Maximal contiguous run of contained grid times (earliest on ties).
    std::optional<std::pair<double, double>> window;
    bool approximate = false;

    bool any_contained() const { return first_containment_time.has_value(); }
};

/// Closed-form leaf for models whose time slices are exact balls:
/// BoundedSpeed and the unbudgeted DoubleIntegrator. Throws
/// UnsupportedAnalytic otherwise, NonpositiveHorizon when t <= vertex.time.
Leaf analytic_leaf(const DynamicsModel& model, const VehicleState& vertex, double t);

/// Leaf approximated from inside by endpoints of piecewise-constant control
/// sequences (n_switches uniformly spaced switch times). Controls come from
/// a deterministic boundary-first sweep of the admissible set, so extremal
/// constant controls are always present and the cloud hull approaches the
/// true leaf from inside. Deterministic: no RNG involved.
Leaf sampled_leaf(const DynamicsModel& model, const VehicleState& vertex, double t,
                  int n_controls, int n_switches);

enum class LeafMethod { Analytic, Sampled };

struct ConeOptions {
    LeafMethod method = LeafMethod::Analytic;
    /// With method Analytic, fall back to sampling per-leaf on
    /// UnsupportedAnalytic instead of propagating the error.
    bool analytic_fallback = false;
    int n_controls = 1000;
    int n_switches = 2;
    /// Build leaves concurrently (output independent of scheduling).
    bool parallel = true;
};

/// Cone over the n_leaves-point uniform grid on [t_start, t_end], inclusive
/// of t_end (a single leaf sits at t_end).
FutureCone build_cone(const DynamicsModel& model, const VehicleState& vertex, double t_start,
                      double t_end, int n_leaves, const ConeOptions& opts = {});

/// Cone over explicit leaf times (strictly increasing, all > vertex.time).
FutureCone build_cone_at_times(const DynamicsModel& model, const VehicleState& vertex,
                               const std::vector<double>& times, const ConeOptions& opts = {});

/// One leaf via the requested method; analytic falls back to sampled when
/// the options allow it. Shared by cone builders and incremental planners.
Leaf make_leaf(const DynamicsModel& model, const VehicleState& vertex, double t,
               const ConeOptions& opts);

/// Containment of inner in outer at equal times, with signed margin.
/// Ball/ball margin is the exact closed form R - (||ci - co|| + ri).
ContainmentVerdict leaf_contains(const Leaf& outer, const Leaf& inner, double tol);

/// Leafwise containment across the shared grid of the two cones, restricted
/// to the overlap of their windows. Fails with NoOverlap on disjoint
/// windows and GridMismatch when leaf times cannot be aligned within 1e-9 s.
ContainmentReport cone_contains(const FutureCone& outer, const FutureCone& inner, double tol);

} // namespace futurecone
