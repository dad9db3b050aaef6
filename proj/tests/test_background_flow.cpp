#include <catch_amalgamated.hpp>

#include <random>

#include "strip_vortex/background_flow.hpp"
#include "strip_vortex/errors.hpp"

using namespace strip_vortex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const AssemblyPtr& disk() {
    static const AssemblyPtr a = assemble(build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 128));
    return a;
}

double top_flux() {
    static const double v = compute_top_flux(*disk());
    return v;
}

BackgroundField field(double b, double gamma) {
    return BackgroundField(disk(), make_flow_config(*disk(), b, gamma, 0.05, top_flux()));
}

}  // namespace

TEST_CASE("wall fluxes balance the obstacle flux", "[background]") {
    const WallFluxes w = compute_wall_fluxes(*disk());
    CHECK(top_flux() > 0.0);
    CHECK_THAT(w.top + w.bottom, WithinAbs(-disk()->obstacle_flux(), 1e-4));
    CHECK_THAT(compute_top_flux(*disk(), 50.0), WithinRel(top_flux(), 1e-6));
}

TEST_CASE("flux constant and regime tags", "[background]") {
    const double b = 2.0;
    const double gc = critical_circulation(*disk(), b, top_flux());
    CHECK_THAT(flux_constant(*disk(), b, gc, top_flux()), WithinAbs(0.0, 1e-12));
    CHECK(flux_constant(*disk(), b, 1.5 * gc, top_flux()) > 0.0);
    CHECK(make_flow_config(*disk(), b, 0.5 * gc, 0.05, top_flux()).regime == Regime::Subcritical);
    CHECK(make_flow_config(*disk(), b, gc, 0.05, top_flux()).regime == Regime::WindowIII);
    CHECK(make_flow_config(*disk(), b, 3.0 * gc, 0.05, top_flux()).regime == Regime::CriticalOrAbove);
    try {
        make_flow_config(*disk(), -1.0, gc, 0.05, top_flux());
        FAIL("expected a configuration error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Configuration);
    }
}

TEST_CASE("flux constant agrees with the Green identity oracle", "[background]") {
    const double b = 1.0;
    const double gc = critical_circulation(*disk(), b, top_flux());
    for (double g : {2.0 * gc, 4.0 * gc}) {
        CHECK_THAT(flux_constant_oracle(*disk(), b, g), WithinRel(flux_constant(*disk(), b, g, top_flux()), 1e-3));
    }
}

TEST_CASE("absolute flux of beta plus x2 equals Gamma over b", "[background]") {
    const double b = 1.5;
    const double gc = critical_circulation(*disk(), b, top_flux());
    for (double g : {gc, 2.0 * gc}) {
        const BackgroundField bg = field(b, g);
        CHECK_THAT(bg.beta_abs_flux(), WithinRel(g / b, 1e-3));
        CHECK_THAT(bg.beta_flux(), WithinRel(-g / b, 1e-3));
        CHECK(bg.beta_plus_x2_normal_derivative().maxCoeff() < 0.0);
    }
}

TEST_CASE("beta far-field coefficients scale with Gamma over b", "[background]") {
    const double b = 1.0;
    const double gc = critical_circulation(*disk(), b, top_flux());
    double lo = 1e300, hi = 0.0;
    for (double g : {gc, 2.0 * gc, 4.0 * gc}) {
        const FarCoefficients c = field(b, g).beta_far_coefficients();
        CHECK(c.plus > 0.0);
        CHECK(c.minus > 0.0);
        CHECK_THAT(c.plus, WithinRel(c.minus, 1e-6));
        lo = std::min(lo, c.plus * b / g);
        hi = std::max(hi, c.plus * b / g);
    }
    CHECK(hi / lo <= 1.5);
    try {
        field(b, 0.5 * gc).beta_far_coefficients();
        FAIL("expected a regime error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Regime);
    }
}

TEST_CASE("background stream function limits", "[background]") {
    const double b = 1.0;
    const double g = 2.0 * critical_circulation(*disk(), b, top_flux());
    const BackgroundField bg = field(b, g);
    const double lambda = bg.config().lambda;
    for (double x2 : {0.3, 1.5, 2.8}) CHECK(std::abs(bg.eta({10.0, x2}) - b * x2) < 1e-3 * b);
    const Vec2 y = bg.assembly().obstacle().curve().position(0.7);
    CHECK_THAT(bg.eta(y), WithinAbs(-lambda, 1e-4 * (b + lambda)));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u1(-4.0, 4.0), u2(0.0, kPi);
    for (int k = 0; k < 200; ++k) {
        const Vec2 x{u1(rng), u2(rng)};
        if (x.x2 <= 0.0 || bg.assembly().obstacle().contains(x)) continue;
        const double e = bg.eta(x);
        CHECK(e > -lambda);
        CHECK(e < b * kPi);
    }
}

TEST_CASE("boundary layer slope of eta", "[background]") {
    const BackgroundField bg = field(1.0, 2.0 * critical_circulation(*disk(), 1.0, top_flux()));
    const ObstacleCurve& obs = bg.assembly().obstacle();
    const Eigen::VectorXd slope = bg.layer_slope();
    const double d = 1e-2;
    for (std::size_t i : {3u, 40u, 77u}) {
        const Vec2 x = obs[i].mid - d * obs[i].normal;
        const double measured = (bg.eta(x) + bg.config().lambda) / d;
        CHECK_THAT(measured, WithinRel(slope[static_cast<Eigen::Index>(i)], 0.05));
    }
}

TEST_CASE("beta decays like e^-|x1|", "[background]") {
    const BackgroundField bg = field(1.0, 2.0 * critical_circulation(*disk(), 1.0, top_flux()));
    const double slope =
        (std::log(std::abs(bg.beta({12.0, kPi / 2.0}))) - std::log(std::abs(bg.beta({6.0, kPi / 2.0})))) / 6.0;
    CHECK_THAT(slope, WithinAbs(-1.0, 0.02));
}
