#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace futurecone {

/// Planar or spatial vector; dim is 2 or 3 and fixed per scenario.
struct Vec {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    int dim = 2;

    Vec() = default;
    Vec(double x, double y) : c{x, y, 0.0}, dim(2) {}
    Vec(double x, double y, double z) : c{x, y, z}, dim(3) {}

    static Vec zero(int d) {
        Vec v;
        v.dim = d;
        return v;
    }

    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }

    double norm2() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }
    double norm() const { return std::sqrt(norm2()); }

    bool finite() const {
        for (int i = 0; i < dim; ++i)
            if (!std::isfinite(c[static_cast<size_t>(i)])) return false;
        return true;
    }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < 3; ++i) c[static_cast<size_t>(i)] += o.c[static_cast<size_t>(i)];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < 3; ++i) c[static_cast<size_t>(i)] -= o.c[static_cast<size_t>(i)];
        return *this;
    }
    Vec& operator*=(double s) {
        for (auto& x : c) x *= s;
        return *this;
    }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator*(double s, Vec a) { return a *= s; }

inline double dot(const Vec& a, const Vec& b) {
    return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}

/// z-component of the cross product; 2-D orientation test.
inline double cross2(const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline Vec cross3(const Vec& a, const Vec& b) {
    Vec r(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
    return r;
}

/// Unit vector along v; returns zero vector when ||v|| <= eps.
Vec unit_or_zero(const Vec& v, double eps = 1e-15);

double point_segment_distance(const Vec& q, const Vec& a, const Vec& b);
double point_triangle_distance(const Vec& q, const Vec& a, const Vec& b, const Vec& c);

/// Convex hull of a finite point cloud with signed-distance queries.
///
/// signed_distance(q) > 0 means q is inside with that much clearance to the
/// boundary; < 0 means q is outside by that Euclidean distance. Degenerate
/// clouds (rank below the ambient dimension) yield a flat hull whose signed
/// distance is never positive: the distance to the flat region, negated.
class ConvexHull {
public:
    ConvexHull() = default;

    static ConvexHull build(const std::vector<Vec>& points);

    double signed_distance(const Vec& q) const;
    bool contains(const Vec& q, double tol) const { return signed_distance(q) >= -tol; }

    int dim() const { return dim_; }
    int rank() const { return rank_; }
    bool flat() const { return rank_ < dim_; }

    /// 2-D: CCW boundary ring (no repeated endpoint). 3-D: hull vertex positions.
    const std::vector<Vec>& vertices() const { return vertices_; }
    /// 3-D only: outward-wound triangles as indices into vertices().
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }

private:
    int dim_ = 2;
    int rank_ = 0;
    std::vector<Vec> vertices_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<Vec> face_normals_; // unit outward
    std::vector<double> face_offsets_;

    // Flat 3-D hulls: orthonormal in-plane basis about origin_, plus the
    // projected 2-D ring in that basis (reused for rank-2 clouds in R^3).
    Vec origin_{};
    Vec basis_u_{}, basis_v_{}, plane_normal_{};
    std::vector<Vec> ring2d_;

    double sd_polygon(const Vec& q) const;
    double sd_polytope(const Vec& q) const;
    double sd_flat3(const Vec& q) const;

    static ConvexHull build2d(std::vector<Vec> pts);
    static ConvexHull build3d(const std::vector<Vec>& pts);
};

/// Monotone-chain hull; returns CCW ring without repeated endpoint.
/// Collinear inputs give a 2-point ring, a single point a 1-point ring.
std::vector<Vec> convex_hull_2d(std::vector<Vec> pts);

/// Signed distance from q to a CCW convex ring: positive inside.
double signed_distance_polygon(const std::vector<Vec>& ring, const Vec& q);

} // namespace futurecone
