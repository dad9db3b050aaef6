#include <catch_amalgamated.hpp>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/geometry.hpp"

using namespace strip_vortex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("disk panels sum to the circumference", "[geometry]") {
    const ObstacleCurve obs = build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 64);
    CHECK(obs.size() == 64);
    double total = 0.0;
    for (const Panel& p : obs.panels()) {
        CHECK(p.weight > 0.0);
        total += p.weight;
    }
    CHECK_THAT(total, WithinRel(2.0 * kPi * 0.5, 1e-3));
}

TEST_CASE("normals point from the fluid into the obstacle", "[geometry]") {
    const ObstacleCurve obs = build_obstacle(Ellipse{{0.2, 1.4}, 0.8, 0.3, 0.4}, 96);
    for (const Panel& p : obs.panels()) CHECK(dot(p.normal, p.mid - obs.centroid()) < 0.0);
}

TEST_CASE("panel endpoints chain into a closed curve", "[geometry]") {
    const ObstacleCurve obs = build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 32);
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const Panel& a = obs[i];
        const Panel& b = obs[(i + 1) % obs.size()];
        const double gap = std::remainder(b.t0 - a.t1, 2.0 * kPi);
        CHECK(std::abs(gap) < 1e-12);
    }
}

TEST_CASE("oversized disk leaves the strip", "[geometry]") {
    CHECK(kind_of([] { build_obstacle(Disk{{0.0, kPi / 2.0}, 2.0}, 64); }) == ErrorKind::Geometry);
}

TEST_CASE("self-intersecting Fourier curve is rejected", "[geometry]") {
    CHECK(kind_of([] { build_obstacle(FourierStar{{0.0, kPi / 2.0}, 0.3, {0.5}, {}}, 64); }) == ErrorKind::Geometry);
}

TEST_CASE("ellipse area identity", "[geometry]") {
    const ObstacleCurve obs = build_obstacle(Ellipse{{0.0, kPi / 2.0}, 0.6, 0.3, 0.0}, 128);
    CHECK_THAT(-0.5 * obs.divergence_identity(), WithinRel(kPi * 0.6 * 0.3, 1e-3));
}

TEST_CASE("divergence identity converges at second order", "[geometry]") {
    const ShapeDescriptor shape = FourierStar{{0.0, kPi / 2.0}, 0.5, {0.0, 0.05}, {0.04}};
    const double area = ParametricCurve(shape).area();
    const double e1 = std::abs(build_obstacle(shape, 32).divergence_identity() + 2.0 * area);
    const double e2 = std::abs(build_obstacle(shape, 64).divergence_identity() + 2.0 * area);
    CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("grid masks cells whose centres lie in the obstacle", "[geometry]") {
    const ObstacleCurve obs = build_obstacle(Disk{{-3.0, kPi / 2.0}, 0.3}, 64);
    const TruncatedGrid grid = build_grid(obs, 4.0, kPi / 64);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vec2 c = grid.center(k);
        CHECK(grid.masked(k) == obs.contains(c));
        if (c.x1 > 1.0) CHECK_FALSE(grid.masked(k));
    }
}

TEST_CASE("unmasked area matches the window minus the obstacle", "[geometry]") {
    const double h = kPi / 64;
    const ObstacleCurve obs = build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 64);
    const TruncatedGrid grid = build_grid(obs, 6.0, h);
    const double expected = 12.0 * kPi - 0.25 * kPi;
    CHECK_THAT(grid.unmasked_area(), WithinAbs(expected, 2.0 * h * (12.0 + 2.0 * kPi * 0.5)));
    const TruncatedGrid fine = build_grid(obs, 6.0, h / 2.0);
    CHECK(std::abs(fine.unmasked_area() - grid.unmasked_area()) < 4.0 * h * obs.perimeter());
}

TEST_CASE("grid spacing must divide pi", "[geometry]") {
    const ObstacleCurve obs = build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 64);
    CHECK(kind_of([&] { build_grid(obs, 6.0, 0.1); }) == ErrorKind::Configuration);
    CHECK(kind_of([&] { build_grid(obs, 6.0, -kPi / 64); }) == ErrorKind::Configuration);
}

TEST_CASE("boundary distance to a disk is exact", "[geometry]") {
    const ObstacleCurve obs = build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 64);
    const BoundaryDistance bd = obs.distance({1.0, kPi / 2.0 + 0.3});
    CHECK_THAT(bd.distance, WithinAbs(std::hypot(1.0, 0.3) - 0.5, 1e-10));
}
