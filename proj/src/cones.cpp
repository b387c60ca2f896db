#include "futurecone/cones.hpp"

#include "futurecone/errors.hpp"
#include "futurecone/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace futurecone {

namespace {

constexpr double kGridTol = 1e-9;
constexpr double kGolden = 0.6180339887498948482; // 1/phi
constexpr double kTwoPi = 6.2831853071795864769;

double frac(double x) { return x - std::floor(x); }

Vec fibonacci_sphere_dir(int k, int n) {
    double z = 1.0 - 2.0 * (k + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = kTwoPi * frac((k + 1) * kGolden);
    return Vec(r * std::cos(phi), r * std::sin(phi), z);
}

// Admissible control samples, boundary values first. The boundary half makes
// the cloud hull reach the true leaf boundary for models whose extremal
// displacements come from constant max-magnitude controls; the interior half
// fills the leaf so mixed sequences have material to draw from.
std::vector<ControlInput> control_pool(const DynamicsModel& model, int dim, int n) {
    std::vector<ControlInput> pool;
    pool.reserve(static_cast<size_t>(n));
    double bound = model.control_bound();

    if (model.kind() == ModelKind::Dubins) {
        pool.push_back(TurnRateCommand{bound});
        if (n > 1) pool.push_back(TurnRateCommand{-bound});
        if (n > 2) pool.push_back(TurnRateCommand{0.0});
        for (int k = 3; k < n; ++k)
            pool.push_back(TurnRateCommand{-bound + 2.0 * bound * frac((k + 1) * kGolden)});
        return pool;
    }

    int nb = (n + 1) / 2;
    int ni = n - nb;
    std::vector<Vec> vecs;
    vecs.reserve(static_cast<size_t>(n));
    if (dim == 2) {
        for (int k = 0; k < nb; ++k) {
            double a = kTwoPi * k / nb;
            vecs.emplace_back(bound * std::cos(a), bound * std::sin(a));
        }
        for (int k = 0; k < ni; ++k) {
            double r = bound * std::sqrt((k + 0.5) / ni);
            double a = kTwoPi * frac((k + 1) * kGolden);
            vecs.emplace_back(r * std::cos(a), r * std::sin(a));
        }
    } else {
        for (int k = 0; k < nb; ++k) vecs.push_back(fibonacci_sphere_dir(k, nb) * bound);
        for (int k = 0; k < ni; ++k) {
            double r = bound * std::cbrt((k + 0.5) / ni);
            vecs.push_back(fibonacci_sphere_dir(k, ni) * r);
        }
    }
    for (const Vec& v : vecs) {
        if (model.kind() == ModelKind::BoundedSpeed)
            pool.push_back(VelocityCommand{v});
        else
            pool.push_back(AccelCommand{v});
    }
    return pool;
}

// Deterministic quasi-random index for the control of segment j in mixed
// sequence i. Strides come from fractional parts of prime square roots.
size_t mix_index(size_t i, int j, size_t n) {
    static const double kTheta[] = {0.41421356237309515, 0.7320508075688772, 0.2360679774997896,
                                    0.6457513110645906,  0.3166247903553998, 0.605551275463989};
    double theta = kTheta[j % 6];
    size_t stride = static_cast<size_t>(theta * static_cast<double>(n)) | 1u;
    return (i * stride + static_cast<size_t>(j) * 31u + 7u) % n;
}

} // namespace

int Leaf::dim() const {
    if (is_ball()) return ball().center.dim;
    return cloud().points.front().dim;
}

std::vector<double> FutureCone::leaf_times() const {
    std::vector<double> ts;
    ts.reserve(leaves.size());
    for (const Leaf& l : leaves) ts.push_back(l.time);
    return ts;
}

const Leaf* FutureCone::leaf_at(double t, double tol) const {
    for (const Leaf& l : leaves)
        if (std::abs(l.time - t) <= tol) return &l;
    return nullptr;
}

Leaf analytic_leaf(const DynamicsModel& model, const VehicleState& vertex, double t) {
    double horizon = t - vertex.time;
    if (!(horizon > 0.0))
        throw Error(Errc::NonpositiveHorizon, "leaf time must exceed the vertex time");

    Leaf leaf;
    leaf.time = t;
    switch (model.kind()) {
        case ModelKind::BoundedSpeed:
            leaf.set = Ball{vertex.position, model.bounded_speed().v_max * horizon};
            return leaf;
        case ModelKind::DoubleIntegrator: {
            const auto& m = model.double_integrator();
            if (m.dv_budget)
                throw Error(Errc::UnsupportedAnalytic,
                            "budgeted double integrator has no ball-shaped leaf");
            Vec center = vertex.position + vertex.velocity * horizon;
            leaf.set = Ball{center, 0.5 * m.a_max * horizon * horizon};
            return leaf;
        }
        case ModelKind::Dubins:
            throw Error(Errc::UnsupportedAnalytic, "dubins leaves are not balls");
    }
    throw Error(Errc::UnsupportedAnalytic, "unknown model kind");
}

Leaf sampled_leaf(const DynamicsModel& model, const VehicleState& vertex, double t,
                  int n_controls, int n_switches) {
    double horizon = t - vertex.time;
    if (!(horizon > 0.0))
        throw Error(Errc::NonpositiveHorizon, "leaf time must exceed the vertex time");
    if (n_controls < 8)
        throw Error(Errc::InvalidResolution, "sampled_leaf needs n_controls >= 8");
    if (n_switches < 0)
        throw Error(Errc::InvalidResolution, "n_switches must be >= 0");

    int dim = vertex.dim();
    const std::vector<ControlInput> pool = control_pool(model, dim, n_controls);
    const size_t n = pool.size();
    const int segments = n_switches + 1;
    const double seg_dt = horizon / segments;

    const bool budgeted = model.kind() == ModelKind::DoubleIntegrator &&
                          model.double_integrator().dv_budget.has_value();

    std::vector<Vec> points(n);
    for (size_t i = 0; i < n; ++i) {
        VehicleState s = vertex;
        std::optional<double> dv;
        if (budgeted) dv = *model.double_integrator().dv_budget;
        // First half of the sweep holds each pool control constant; the rest
        // mix pool controls across segments.
        bool constant = n_switches == 0 || i < (n + 1) / 2;
        for (int j = 0; j < segments; ++j) {
            ControlInput u = constant ? pool[i] : pool[mix_index(i, j, n)];
            if (budgeted) {
                // Spend what budget remains, then coast.
                double mag = control_magnitude(u);
                double spend = mag * seg_dt;
                if (spend > *dv) {
                    double scale = *dv / spend;
                    u = AccelCommand{std::get<AccelCommand>(u).value * scale};
                }
            }
            StepResult r = step(model, s, u, seg_dt, dv);
            s = r.state;
            dv = r.dv_remaining;
        }
        points[i] = s.position;
    }

    Leaf leaf;
    leaf.time = t;
    leaf.convex_source = model.kind() != ModelKind::Dubins;
    ConvexHull hull = ConvexHull::build(points);
    leaf.set = PointCloud{std::move(points), std::move(hull)};
    return leaf;
}

Leaf make_leaf(const DynamicsModel& model, const VehicleState& vertex, double t,
               const ConeOptions& opts) {
    if (opts.method == LeafMethod::Sampled)
        return sampled_leaf(model, vertex, t, opts.n_controls, opts.n_switches);
    try {
        return analytic_leaf(model, vertex, t);
    } catch (const Error& e) {
        if (e.code() == Errc::UnsupportedAnalytic && opts.analytic_fallback)
            return sampled_leaf(model, vertex, t, opts.n_controls, opts.n_switches);
        throw;
    }
}

FutureCone build_cone_at_times(const DynamicsModel& model, const VehicleState& vertex,
                               const std::vector<double>& times, const ConeOptions& opts) {
    if (times.empty()) throw Error(Errc::BadWindow, "cone needs at least one leaf time");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw Error(Errc::BadWindow, "leaf times must be strictly increasing");

    FutureCone cone;
    cone.vertex = vertex;
    cone.model = model;
    cone.t_start = times.front();
    cone.t_end = times.back();
    cone.leaves.resize(times.size());

    auto build_one = [&](size_t i) { cone.leaves[i] = make_leaf(model, vertex, times[i], opts); };

    if (opts.parallel && times.size() > 1 &&
        (opts.method == LeafMethod::Sampled || opts.analytic_fallback))
        parallel_for(times.size(), build_one);
    else
        for (size_t i = 0; i < times.size(); ++i) build_one(i);

    return cone;
}

FutureCone build_cone(const DynamicsModel& model, const VehicleState& vertex, double t_start,
                      double t_end, int n_leaves, const ConeOptions& opts) {
    if (!(t_end > t_start)) throw Error(Errc::BadWindow, "t_end must exceed t_start");
    if (!(vertex.time <= t_start))
        throw Error(Errc::BadWindow, "window must start at or after the vertex time");
    if (n_leaves < 1) throw Error(Errc::BadWindow, "n_leaves must be >= 1");

    std::vector<double> times;
    times.reserve(static_cast<size_t>(n_leaves));
    if (n_leaves == 1) {
        times.push_back(t_end);
    } else {
        double dt = (t_end - t_start) / (n_leaves - 1);
        for (int k = 0; k < n_leaves; ++k)
            times.push_back(k + 1 == n_leaves ? t_end : t_start + k * dt);
    }
    return build_cone_at_times(model, vertex, times, opts);
}

ContainmentVerdict leaf_contains(const Leaf& outer, const Leaf& inner, double tol) {
    if (std::abs(outer.time - inner.time) > kGridTol)
        throw Error(Errc::TimeMismatch, "leaves sit at different times");

    ContainmentVerdict v;
    v.approximate = !outer.is_ball() && !outer.convex_source;

    if (outer.is_ball() && inner.is_ball()) {
        const Ball& o = outer.ball();
        const Ball& i = inner.ball();
        v.margin = o.radius - ((i.center - o.center).norm() + i.radius);
    } else if (outer.is_ball()) {
        const Ball& o = outer.ball();
        double m = std::numeric_limits<double>::infinity();
        for (const Vec& p : inner.cloud().points)
            m = std::min(m, o.radius - (p - o.center).norm());
        v.margin = m;
    } else if (inner.is_ball()) {
        const Ball& i = inner.ball();
        v.margin = outer.cloud().hull.signed_distance(i.center) - i.radius;
    } else {
        const ConvexHull& hull = outer.cloud().hull;
        double m = std::numeric_limits<double>::infinity();
        for (const Vec& p : inner.cloud().points) m = std::min(m, hull.signed_distance(p));
        v.margin = m;
    }

    v.contained = v.margin >= -tol;
    return v;
}

ContainmentReport cone_contains(const FutureCone& outer, const FutureCone& inner, double tol) {
    double lo = std::max(outer.t_start, inner.t_start);
    double hi = std::min(outer.t_end, inner.t_end);
    if (lo > hi + kGridTol) throw Error(Errc::NoOverlap, "cone windows are disjoint");

    // Pair up equal-time leaves inside the overlap; every leaf of either
    // cone that falls in the overlap must find a partner.
    std::vector<std::pair<const Leaf*, const Leaf*>> pairs;
    size_t j = 0;
    for (const Leaf& lo_leaf : outer.leaves) {
        if (lo_leaf.time < lo - kGridTol || lo_leaf.time > hi + kGridTol) continue;
        while (j < inner.leaves.size() && inner.leaves[j].time < lo_leaf.time - kGridTol) {
            if (inner.leaves[j].time >= lo - kGridTol)
                throw Error(Errc::GridMismatch, "inner leaf time has no equal-time outer leaf");
            ++j;
        }
        if (j >= inner.leaves.size() ||
            std::abs(inner.leaves[j].time - lo_leaf.time) > kGridTol)
            throw Error(Errc::GridMismatch, "outer leaf time has no equal-time inner leaf");
        pairs.emplace_back(&lo_leaf, &inner.leaves[j]);
        ++j;
    }
    for (; j < inner.leaves.size(); ++j)
        if (inner.leaves[j].time >= lo - kGridTol && inner.leaves[j].time <= hi + kGridTol)
            throw Error(Errc::GridMismatch, "inner leaf time has no equal-time outer leaf");
    if (pairs.empty())
        throw Error(Errc::GridMismatch, "no shared leaf times inside the window overlap");

    ContainmentReport report;
    report.per_time.reserve(pairs.size());
    for (const auto& [out_leaf, in_leaf] : pairs) {
        ContainmentVerdict v = leaf_contains(*out_leaf, *in_leaf, tol);
        report.approximate = report.approximate || v.approximate;
        if (v.contained && !report.first_containment_time)
            report.first_containment_time = out_leaf->time;
        report.per_time.emplace_back(out_leaf->time, v);
    }

    // Longest contiguous contained run, earliest on ties.
    size_t best_len = 0, best_start = 0, run_start = 0, run_len = 0;
    for (size_t i = 0; i < report.per_time.size(); ++i) {
        if (report.per_time[i].second.contained) {
            if (run_len == 0) run_start = i;
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
        } else {
            run_len = 0;
        }
    }
    if (best_len > 0)
        report.window = std::make_pair(report.per_time[best_start].first,
                                       report.per_time[best_start + best_len - 1].first);
    return report;
}

} // namespace futurecone
