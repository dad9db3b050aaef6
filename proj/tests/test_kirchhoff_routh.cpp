#include <catch_amalgamated.hpp>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/kirchhoff_routh.hpp"
#include "strip_vortex/strip_kernel.hpp"

using namespace strip_vortex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const AssemblyPtr& disk() {
    static const AssemblyPtr a = assemble(build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 128));
    return a;
}

BackgroundField critical_field(double b) {
    const double i_top = compute_top_flux(*disk());
    return BackgroundField(disk(), make_flow_config(*disk(), b, critical_circulation(*disk(), b, i_top), 0.05, i_top));
}

Landscape synthetic(const std::function<double(double, double)>& f) {
    Landscape land;
    for (int k = -3; k <= 3; ++k) {
        land.lattice.u.push_back(0.1 * k);
        land.lattice.v.push_back(1.0 + 0.1 * k);
    }
    for (double u : land.lattice.u) {
        for (double v : land.lattice.v) land.values.push_back(f(u, v));
    }
    return land;
}

}  // namespace

TEST_CASE("far cross-section follows the strip profile", "[landscape]") {
    const BackgroundField bg = critical_field(1.0);
    for (double x2 : {0.3, 1.0, 2.0}) {
        const double expected = hs_robin({10.0, x2}) + 2.0 * x2;
        CHECK_THAT(evaluate_kr(bg, {10.0, x2}), WithinAbs(expected, 1e-2));
    }
}

TEST_CASE("far cross-section minimizer sits at t0", "[landscape]") {
    const BackgroundField bg = critical_field(1.0);
    const double t0 = far_field_height(1.0);
    CHECK_THAT(t0, WithinAbs(std::atan(1.0 / (4.0 * kPi)), 1e-12));
    const double h = kPi / 1024;
    double best = 1e300, arg = 0.0;
    for (int j = 0; j < 200; ++j) {
        const double x2 = (j + 0.5) * h;
        const double v = evaluate_kr(bg, {12.0, x2});
        if (v < best) best = v, arg = x2;
    }
    CHECK(std::abs(arg - t0) < 2.0 * h);
}

TEST_CASE("landscape blows up at the walls", "[landscape]") {
    const BackgroundField bg = critical_field(1.0);
    CHECK(evaluate_kr(bg, {2.0, 0.02}) > evaluate_kr(bg, {2.0, 0.05}));
    CHECK(evaluate_kr(bg, {2.0, 0.05}) > evaluate_kr(bg, {2.0, 0.1}));
}

TEST_CASE("changing the circulation shifts the landscape by rho", "[landscape]") {
    const double i_top = compute_top_flux(*disk());
    const double gc = critical_circulation(*disk(), 1.0, i_top);
    const BackgroundField a(disk(), make_flow_config(*disk(), 1.0, gc, 0.05, i_top));
    const BackgroundField b(disk(), make_flow_config(*disk(), 1.0, 1.7 * gc, 0.05, i_top));
    for (const Vec2 x : {Vec2{1.0, 1.0}, Vec2{-0.4, 2.5}}) {
        const double shift = -2.0 * (b.config().lambda - a.config().lambda) * disk()->rho_value(x);
        CHECK_THAT(evaluate_kr(b, x) - evaluate_kr(a, x), WithinAbs(shift, 1e-6));
    }
}

TEST_CASE("quadratic refinement recovers the vertex", "[landscape]") {
    const Landscape land = synthetic([](double u, double v) {
        return 2.0 * (u - 0.03) * (u - 0.03) + (v - 1.04) * (v - 1.04) + 0.5 * (u - 0.03) * (v - 1.04);
    });
    const RefinedPoint p = refine_minimizer(land, 3, 3);
    CHECK_FALSE(p.degenerate);
    CHECK_THAT(p.point.x1, WithinAbs(0.03, 1e-10));
    CHECK_THAT(p.point.x2, WithinAbs(1.04, 1e-10));
}

TEST_CASE("plateau refinement is degenerate", "[landscape]") {
    const Landscape land = synthetic([](double, double) { return 1.0; });
    CHECK(refine_minimizer(land, 3, 3).degenerate);
}

TEST_CASE("regime (i) window scan", "[landscape][slow]") {
    const BackgroundField bg = critical_field(1.0);
    const double h = kPi / 128;
    const RegionSpec region;
    const Landscape land = scan(bg, region, h);
    const auto best = land.best();
    REQUIRE(best);
    CHECK(std::abs(best->location.x1) < h);
    CHECK(best->wall_distance > 5.0 * h);
    CHECK(region.half_width - std::abs(best->location.x1) > 5.0 * h);
    CHECK(land.min_value() < frame_minimum(bg, region.half_width, h));
}

TEST_CASE("empty regions are reported", "[landscape]") {
    const BackgroundField bg = critical_field(1.0);
    RegionSpec region;
    region.kind = RegionKind::Exterior;
    region.half_width = 1.6;
    region.delta = 3.0;
    try {
        scan(bg, region, kPi / 64);
        FAIL("expected a region error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Region);
    }
}
