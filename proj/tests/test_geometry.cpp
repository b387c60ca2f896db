#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "futurecone/errors.hpp"
#include "futurecone/geometry.hpp"
#include "futurecone/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace futurecone;

namespace {

// Brute-force halfplane test: q is inside a CCW ring iff it is left of (or
// on) every edge. Independent of the signed-distance path.
bool inside_brute(const std::vector<Vec>& ring, const Vec& q) {
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i)
        if (cross2(ring[i], ring[(i + 1) % n], q) < 0.0) return false;
    return true;
}

double brute_boundary_distance(const std::vector<Vec>& ring, const Vec& q) {
    double d = 1e300;
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i)
        d = std::min(d, point_segment_distance(q, ring[i], ring[(i + 1) % n]));
    return d;
}

std::vector<Vec> unit_square() {
    return {Vec(0, 0), Vec(1, 0), Vec(1, 1), Vec(0, 1)};
}

} // namespace

TEST_CASE("monotone chain hull of a square with interior points") {
    std::vector<Vec> pts = unit_square();
    pts.push_back(Vec(0.5, 0.5));
    pts.push_back(Vec(0.25, 0.75));
    auto ring = convex_hull_2d(pts);
    CHECK(ring.size() == 4);

    // CCW orientation: shoelace area positive.
    double area = 0.0;
    for (size_t i = 0; i < ring.size(); ++i) {
        const Vec& a = ring[i];
        const Vec& b = ring[(i + 1) % ring.size()];
        area += a[0] * b[1] - b[0] * a[1];
    }
    CHECK(area / 2.0 == doctest::Approx(1.0));
}

TEST_CASE("polygon signed distance on the unit square") {
    auto ring = unit_square();
    CHECK(signed_distance_polygon(ring, Vec(0.5, 0.5)) == doctest::Approx(0.5));
    CHECK(signed_distance_polygon(ring, Vec(2.0, 0.5)) == doctest::Approx(-1.0));
    CHECK(signed_distance_polygon(ring, Vec(0.5, 1.2)) == doctest::Approx(-0.2));
    CHECK(signed_distance_polygon(ring, Vec(2.0, 2.0)) ==
          doctest::Approx(-std::sqrt(2.0))); // nearest feature is a corner
    CHECK(signed_distance_polygon(ring, Vec(1.0, 0.5)) == doctest::Approx(0.0));
}

TEST_CASE("hull contains all of its input points") {
    SplitMix64 rng(2024);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Vec> pts;
        for (int i = 0; i < 60; ++i)
            pts.push_back(Vec(rng.uniform(-2, 2), rng.uniform(-1, 3)));
        ConvexHull h = ConvexHull::build(pts);
        for (const Vec& p : pts) CHECK(h.signed_distance(p) >= -1e-12);
    }
}

TEST_CASE("hull signed distance agrees with the brute-force oracle") {
    SplitMix64 rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<Vec> pts;
        for (int i = 0; i < 40; ++i)
            pts.push_back(Vec(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        ConvexHull h = ConvexHull::build(pts);
        const auto& ring = h.vertices();
        for (int probe = 0; probe < 50; ++probe) {
            Vec q(rng.uniform(-2, 2), rng.uniform(-2, 2));
            double sd = h.signed_distance(q);
            bool inside = inside_brute(ring, q);
            CHECK(inside == (sd >= 0.0));
            CHECK(std::abs(sd) == doctest::Approx(brute_boundary_distance(ring, q)));
        }
    }
}

TEST_CASE("degenerate 2-D clouds: point and segment") {
    ConvexHull point = ConvexHull::build({Vec(1, 2)});
    CHECK(point.flat());
    CHECK(point.signed_distance(Vec(1, 2)) == doctest::Approx(0.0));
    CHECK(point.signed_distance(Vec(4, 6)) == doctest::Approx(-5.0));

    std::vector<Vec> collinear;
    for (int i = 0; i <= 10; ++i) collinear.push_back(Vec(i * 0.1, i * 0.2));
    ConvexHull seg = ConvexHull::build(collinear);
    CHECK(seg.flat());
    CHECK(seg.signed_distance(Vec(0.5, 1.0)) == doctest::Approx(0.0));
    CHECK(seg.signed_distance(Vec(1.3, 2.0)) < 0.0);
}

TEST_CASE("empty cloud is rejected") {
    CHECK_THROWS_AS(ConvexHull::build({}), Error);
}

TEST_CASE("3-D hull of the unit cube") {
    std::vector<Vec> pts;
    for (int x = 0; x <= 1; ++x)
        for (int y = 0; y <= 1; ++y)
            for (int z = 0; z <= 1; ++z) pts.push_back(Vec(x, y, z));
    pts.push_back(Vec(0.5, 0.5, 0.5));
    ConvexHull h = ConvexHull::build(pts);
    CHECK(h.rank() == 3);
    CHECK(h.vertices().size() == 8);
    CHECK(h.signed_distance(Vec(0.5, 0.5, 0.5)) == doctest::Approx(0.5));
    CHECK(h.signed_distance(Vec(2.0, 0.5, 0.5)) == doctest::Approx(-1.0));
    CHECK(h.signed_distance(Vec(0.0, 0.0, 0.0)) == doctest::Approx(0.0));
    CHECK(h.signed_distance(Vec(2.0, 2.0, 2.0)) == doctest::Approx(-std::sqrt(3.0)));
}

TEST_CASE("3-D hull of sphere samples approximates the analytic ball") {
    SplitMix64 rng(7);
    const double R = 2.0;
    std::vector<Vec> pts;
    for (int i = 0; i < 400; ++i) pts.push_back(rng.unit_vector(3) * R);
    for (int i = 0; i < 100; ++i)
        pts.push_back(rng.unit_vector(3) * (R * std::cbrt(rng.uniform01())));
    ConvexHull h = ConvexHull::build(pts);
    CHECK(h.rank() == 3);
    for (const Vec& p : pts) CHECK(h.signed_distance(p) >= -1e-9);

    for (int probe = 0; probe < 200; ++probe) {
        Vec q = rng.unit_vector(3) * rng.uniform(0.0, 2.0 * R);
        double sd_ball = R - q.norm();
        double sd_hull = h.signed_distance(q);
        CHECK(sd_hull <= sd_ball + 1e-9); // hull is inscribed in the ball
        CHECK(sd_hull >= sd_ball - 0.25); // and close at n = 400
    }
}

TEST_CASE("coplanar 3-D cloud has a flat hull with nonpositive distance") {
    std::vector<Vec> pts;
    SplitMix64 rng(5);
    for (int i = 0; i < 50; ++i) pts.push_back(Vec(rng.uniform(0, 1), rng.uniform(0, 1), 0.25));
    ConvexHull h = ConvexHull::build(pts);
    CHECK(h.flat());
    CHECK(h.rank() == 2);
    for (const Vec& p : pts) CHECK(h.signed_distance(p) >= -1e-12);
    CHECK(h.signed_distance(Vec(0.5, 0.5, 0.25)) <= 0.0);
    CHECK(h.signed_distance(Vec(0.5, 0.5, 1.25)) == doctest::Approx(-1.0).epsilon(0.05));

    std::vector<Vec> line;
    for (int i = 0; i < 10; ++i) line.push_back(Vec(i * 1.0, 0.0, 0.0));
    ConvexHull seg = ConvexHull::build(line);
    CHECK(seg.rank() == 1);
    CHECK(seg.signed_distance(Vec(4.0, 3.0, 0.0)) == doctest::Approx(-3.0));
}

TEST_CASE("point-triangle distance against dense barycentric sampling") {
    SplitMix64 rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        Vec a = rng.unit_vector(3) * rng.uniform(0.5, 2.0);
        Vec b = rng.unit_vector(3) * rng.uniform(0.5, 2.0);
        Vec c = rng.unit_vector(3) * rng.uniform(0.5, 2.0);
        Vec q = rng.unit_vector(3) * rng.uniform(0.0, 3.0);
        double fast = point_triangle_distance(q, a, b, c);
        double brute = 1e300;
        const int n = 120;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= n - i; ++j) {
                double u = static_cast<double>(i) / n;
                double v = static_cast<double>(j) / n;
                Vec p = a + (b - a) * u + (c - a) * v;
                brute = std::min(brute, (q - p).norm());
            }
        }
        CHECK(fast <= brute + 1e-12);
        CHECK(fast >= brute - 0.05); // dense-grid oracle overestimates slightly
    }
}
