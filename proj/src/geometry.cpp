#include "futurecone/geometry.hpp"

#include "futurecone/errors.hpp"

#include <algorithm>
#include <limits>

namespace futurecone {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::VariantMismatch: return "VariantMismatch";
        case Errc::InadmissibleControl: return "InadmissibleControl";
        case Errc::BudgetExhausted: return "BudgetExhausted";
        case Errc::UnsupportedAnalytic: return "UnsupportedAnalytic";
        case Errc::NonpositiveHorizon: return "NonpositiveHorizon";
        case Errc::InvalidResolution: return "InvalidResolution";
        case Errc::BadWindow: return "BadWindow";
        case Errc::TimeMismatch: return "TimeMismatch";
        case Errc::NoOverlap: return "NoOverlap";
        case Errc::GridMismatch: return "GridMismatch";
        case Errc::NoGuarantee: return "NoGuarantee";
        case Errc::EmptyPolicies: return "EmptyPolicies";
        case Errc::UnsatisfiableDistribution: return "UnsatisfiableDistribution";
        case Errc::ConfigError: return "ConfigError";
        case Errc::EmptyTrajectory: return "EmptyTrajectory";
        case Errc::DegenerateCloud: return "DegenerateCloud";
        case Errc::SchemaError: return "SchemaError";
    }
    return "UnknownError";
}

Vec unit_or_zero(const Vec& v, double eps) {
    double n = v.norm();
    if (n <= eps) return Vec::zero(v.dim);
    return v * (1.0 / n);
}

double point_segment_distance(const Vec& q, const Vec& a, const Vec& b) {
    Vec ab = b - a;
    double denom = ab.norm2();
    if (denom <= 0.0) return (q - a).norm();
    double t = dot(q - a, ab) / denom;
    t = std::clamp(t, 0.0, 1.0);
    return (q - (a + ab * t)).norm();
}

// Closest-point-on-triangle (Ericson, Real-Time Collision Detection).
double point_triangle_distance(const Vec& q, const Vec& a, const Vec& b, const Vec& c) {
    Vec ab = b - a, ac = c - a, aq = q - a;
    double d1 = dot(ab, aq), d2 = dot(ac, aq);
    if (d1 <= 0.0 && d2 <= 0.0) return (q - a).norm();

    Vec bq = q - b;
    double d3 = dot(ab, bq), d4 = dot(ac, bq);
    if (d3 >= 0.0 && d4 <= d3) return (q - b).norm();

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        double v = d1 / (d1 - d3);
        return (q - (a + ab * v)).norm();
    }

    Vec cq = q - c;
    double d5 = dot(ab, cq), d6 = dot(ac, cq);
    if (d6 >= 0.0 && d5 <= d6) return (q - c).norm();

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        double w = d2 / (d2 - d6);
        return (q - (a + ac * w)).norm();
    }

    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (q - (b + (c - b) * w)).norm();
    }

    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    return (q - (a + ab * v + ac * w)).norm();
}

std::vector<Vec> convex_hull_2d(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        if (a[0] != b[0]) return a[0] < b[0];
        return a[1] < b[1];
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec& a, const Vec& b) { return a[0] == b[0] && a[1] == b[1]; }),
              pts.end());

    size_t n = pts.size();
    if (n <= 2) return pts;

    std::vector<Vec> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1); // last point repeats the first
    if (hull.size() < 3) {
        // All input collinear after pruning; keep the extreme pair.
        return {pts.front(), pts.back()};
    }
    return hull;
}

double signed_distance_polygon(const std::vector<Vec>& ring, const Vec& q) {
    if (ring.empty()) return -std::numeric_limits<double>::infinity();
    if (ring.size() == 1) return -(q - ring[0]).norm();
    if (ring.size() == 2) return -point_segment_distance(q, ring[0], ring[1]);

    bool inside = true;
    double dmin = std::numeric_limits<double>::infinity();
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec& a = ring[i];
        const Vec& b = ring[(i + 1) % n];
        if (cross2(a, b, q) < 0.0) inside = false;
        dmin = std::min(dmin, point_segment_distance(q, a, b));
    }
    return inside ? dmin : -dmin;
}

namespace {

// Greedy affine basis: returns indices of up to dim+1 points spanning the
// cloud, and the achieved rank under tolerance eps.
struct SpanBasis {
    int rank = 0;
    std::array<size_t, 4> idx{0, 0, 0, 0};
};

SpanBasis affine_span(const std::vector<Vec>& pts, int dim, double eps) {
    SpanBasis sb;
    if (pts.empty()) return sb;
    sb.idx[0] = 0;

    // farthest point from p0
    double best = -1.0;
    size_t bi = 0;
    for (size_t i = 1; i < pts.size(); ++i) {
        double d = (pts[i] - pts[0]).norm();
        if (d > best) {
            best = d;
            bi = i;
        }
    }
    if (best <= eps) {
        sb.rank = 0;
        return sb;
    }
    sb.idx[1] = bi;
    sb.rank = 1;

    // farthest from the line p0-p1
    const Vec a = pts[sb.idx[0]], b = pts[sb.idx[1]];
    Vec ab = b - a;
    double ab2 = ab.norm2();
    best = -1.0;
    bi = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        Vec ap = pts[i] - a;
        Vec perp = ap - ab * (dot(ap, ab) / ab2);
        double d = perp.norm();
        if (d > best) {
            best = d;
            bi = i;
        }
    }
    if (best <= eps) return sb;
    sb.idx[2] = bi;
    sb.rank = 2;

    if (dim == 2) return sb;

    // farthest from the plane p0-p1-p2
    Vec n = cross3(pts[sb.idx[1]] - a, pts[sb.idx[2]] - a);
    double nn = n.norm();
    if (nn <= 0.0) return sb;
    n *= 1.0 / nn;
    best = -1.0;
    bi = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        double d = std::abs(dot(pts[i] - a, n));
        if (d > best) {
            best = d;
            bi = i;
        }
    }
    if (best <= eps) return sb;
    sb.idx[3] = bi;
    sb.rank = 3;
    return sb;
}

struct Face {
    int a, b, c;
    Vec n;    // unit outward normal
    double d; // plane offset: dot(n, x) = d on the face
    bool alive = true;
};

Face make_face(const std::vector<Vec>& pts, int a, int b, int c, const Vec& interior) {
    Face f{a, b, c, Vec::zero(3), 0.0, true};
    Vec n = cross3(pts[static_cast<size_t>(b)] - pts[static_cast<size_t>(a)],
                   pts[static_cast<size_t>(c)] - pts[static_cast<size_t>(a)]);
    double nn = n.norm();
    if (nn > 0.0) n *= 1.0 / nn;
    double off = dot(n, pts[static_cast<size_t>(a)]);
    if (dot(n, interior) - off > 0.0) { // flip to point away from the interior
        std::swap(f.b, f.c);
        n *= -1.0;
        off = -off;
    }
    f.n = n;
    f.d = off;
    return f;
}

} // namespace

ConvexHull ConvexHull::build2d(std::vector<Vec> pts) {
    ConvexHull h;
    h.dim_ = 2;
    h.vertices_ = convex_hull_2d(std::move(pts));
    h.rank_ = h.vertices_.size() >= 3 ? 2 : (h.vertices_.size() == 2 ? 1 : 0);
    return h;
}

ConvexHull ConvexHull::build3d(const std::vector<Vec>& pts) {
    double extent = 0.0;
    for (const Vec& p : pts) extent = std::max(extent, (p - pts[0]).norm());
    const double eps = 1e-9 * std::max(1.0, extent);

    SpanBasis sb = affine_span(pts, 3, eps);
    ConvexHull h;
    h.dim_ = 3;
    h.rank_ = sb.rank;

    if (sb.rank == 0) {
        h.vertices_ = {pts[0]};
        return h;
    }
    if (sb.rank == 1) {
        // extreme pair along the spanning direction
        Vec dir = unit_or_zero(pts[sb.idx[1]] - pts[sb.idx[0]]);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        size_t ilo = 0, ihi = 0;
        for (size_t i = 0; i < pts.size(); ++i) {
            double t = dot(pts[i] - pts[sb.idx[0]], dir);
            if (t < lo) { lo = t; ilo = i; }
            if (t > hi) { hi = t; ihi = i; }
        }
        h.vertices_ = {pts[ilo], pts[ihi]};
        return h;
    }
    if (sb.rank == 2) {
        // coplanar: hull of the in-plane projection
        h.origin_ = pts[sb.idx[0]];
        h.basis_u_ = unit_or_zero(pts[sb.idx[1]] - h.origin_);
        Vec w = pts[sb.idx[2]] - h.origin_;
        h.basis_v_ = unit_or_zero(w - h.basis_u_ * dot(w, h.basis_u_));
        h.plane_normal_ = cross3(h.basis_u_, h.basis_v_);
        std::vector<Vec> proj;
        proj.reserve(pts.size());
        for (const Vec& p : pts) {
            Vec r = p - h.origin_;
            proj.emplace_back(dot(r, h.basis_u_), dot(r, h.basis_v_));
        }
        h.ring2d_ = convex_hull_2d(std::move(proj));
        for (const Vec& q : h.ring2d_)
            h.vertices_.push_back(h.origin_ + h.basis_u_ * q[0] + h.basis_v_ * q[1]);
        return h;
    }

    // Full-rank: incremental hull seeded with the spanning tetrahedron.
    Vec interior = (pts[sb.idx[0]] + pts[sb.idx[1]] + pts[sb.idx[2]] + pts[sb.idx[3]]) * 0.25;
    std::vector<Face> faces;
    int t0 = static_cast<int>(sb.idx[0]), t1 = static_cast<int>(sb.idx[1]),
        t2 = static_cast<int>(sb.idx[2]), t3 = static_cast<int>(sb.idx[3]);
    faces.push_back(make_face(pts, t0, t1, t2, interior));
    faces.push_back(make_face(pts, t0, t1, t3, interior));
    faces.push_back(make_face(pts, t0, t2, t3, interior));
    faces.push_back(make_face(pts, t1, t2, t3, interior));

    for (size_t i = 0; i < pts.size(); ++i) {
        if (i == sb.idx[0] || i == sb.idx[1] || i == sb.idx[2] || i == sb.idx[3]) continue;
        const Vec& p = pts[i];

        std::vector<size_t> visible;
        for (size_t f = 0; f < faces.size(); ++f) {
            if (!faces[f].alive) continue;
            if (dot(faces[f].n, p) - faces[f].d > eps) visible.push_back(f);
        }
        if (visible.empty()) continue;

        // Horizon = directed edges of visible faces whose reverse is not visible.
        std::vector<std::pair<int, int>> edges;
        for (size_t f : visible) {
            const Face& face = faces[f];
            edges.emplace_back(face.a, face.b);
            edges.emplace_back(face.b, face.c);
            edges.emplace_back(face.c, face.a);
        }
        std::vector<std::pair<int, int>> horizon;
        for (const auto& e : edges) {
            bool paired = false;
            for (const auto& r : edges) {
                if (r.first == e.second && r.second == e.first) {
                    paired = true;
                    break;
                }
            }
            if (!paired) horizon.push_back(e);
        }
        for (size_t f : visible) faces[f].alive = false;
        for (const auto& e : horizon)
            faces.push_back(make_face(pts, e.first, e.second, static_cast<int>(i), interior));
    }

    // Compact: renumber the vertices actually used.
    std::vector<int> remap(pts.size(), -1);
    for (const Face& f : faces) {
        if (!f.alive) continue;
        for (int v : {f.a, f.b, f.c}) {
            if (remap[static_cast<size_t>(v)] < 0) {
                remap[static_cast<size_t>(v)] = static_cast<int>(h.vertices_.size());
                h.vertices_.push_back(pts[static_cast<size_t>(v)]);
            }
        }
    }
    for (const Face& f : faces) {
        if (!f.alive) continue;
        h.faces_.push_back({remap[static_cast<size_t>(f.a)], remap[static_cast<size_t>(f.b)],
                            remap[static_cast<size_t>(f.c)]});
        h.face_normals_.push_back(f.n);
        h.face_offsets_.push_back(f.d);
    }
    return h;
}

ConvexHull ConvexHull::build(const std::vector<Vec>& points) {
    if (points.empty()) throw Error(Errc::DegenerateCloud, "cannot build hull of empty cloud");
    return points[0].dim == 2 ? build2d(points) : build3d(points);
}

double ConvexHull::sd_polygon(const Vec& q) const { return signed_distance_polygon(vertices_, q); }

double ConvexHull::sd_polytope(const Vec& q) const {
    double smax = -std::numeric_limits<double>::infinity();
    for (size_t f = 0; f < faces_.size(); ++f)
        smax = std::max(smax, dot(face_normals_[f], q) - face_offsets_[f]);
    if (smax <= 0.0) return -smax;

    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& f : faces_) {
        dmin = std::min(dmin,
                        point_triangle_distance(q, vertices_[static_cast<size_t>(f[0])],
                                                vertices_[static_cast<size_t>(f[1])],
                                                vertices_[static_cast<size_t>(f[2])]));
    }
    return -dmin;
}

double ConvexHull::sd_flat3(const Vec& q) const {
    Vec r = q - origin_;
    double h = dot(r, plane_normal_);
    Vec q2(dot(r, basis_u_), dot(r, basis_v_));
    double s = signed_distance_polygon(ring2d_, q2);
    double lateral = std::max(0.0, -s);
    return -std::hypot(h, lateral);
}

double ConvexHull::signed_distance(const Vec& q) const {
    if (vertices_.empty()) return -std::numeric_limits<double>::infinity();
    if (dim_ == 2) return sd_polygon(q);
    if (rank_ == 3) return sd_polytope(q);
    if (rank_ == 2) return sd_flat3(q);
    if (rank_ == 1) return -point_segment_distance(q, vertices_[0], vertices_[1]);
    return -(q - vertices_[0]).norm();
}

} // namespace futurecone
