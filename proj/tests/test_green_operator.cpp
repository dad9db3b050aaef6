#include <catch_amalgamated.hpp>

#include <random>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/green_operator.hpp"
#include "strip_vortex/strip_kernel.hpp"

using namespace strip_vortex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const GreenAssembly& disk_assembly() {
    static const AssemblyPtr a = assemble(build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 128));
    return *a;
}

}  // namespace

TEST_CASE("lambda0 is positive and stable", "[green]") {
    const double coarse = disk_assembly().lambda0();
    const double fine = assemble(build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 256))->lambda0();
    CHECK(coarse > 0.0);
    CHECK(std::abs(fine - coarse) < 1e-4 * fine);
    const double small = assemble(build_obstacle(Disk{{0.0, kPi / 2.0}, 0.1}, 128))->lambda0();
    CHECK(small > coarse);
}

TEST_CASE("Green function is symmetric and positive", "[green]") {
    const GreenAssembly& g = disk_assembly();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u1(-3.0, 3.0), u2(0.05, kPi - 0.05);
    int pairs = 0;
    while (pairs < 100) {
        const Vec2 y{u1(rng), u2(rng)}, x{u1(rng), u2(rng)};
        if (g.obstacle().distance(y).distance < 0.05 || g.obstacle().distance(x).distance < 0.05) continue;
        if (g.obstacle().contains(x) || g.obstacle().contains(y)) continue;
        CHECK_THAT(g.g0(y, x), WithinAbs(g.g0(x, y), 1e-4));
        CHECK_THAT(g.g(y, x), WithinAbs(g.g(x, y), 1e-4));
        CHECK(g.g(y, x) > 0.0);
        ++pairs;
    }
}

TEST_CASE("Green function traces", "[green]") {
    const GreenAssembly& g = disk_assembly();
    const Vec2 x{1.0, 1.0};
    CHECK(std::abs(g.g({0.3, 1e-9}, x)) < 1e-6);
    CHECK(std::abs(g.g({-0.8, kPi - 1e-9}, x)) < 1e-6);
    for (double t : {0.1, 1.3, 2.9, 4.4}) {
        const Vec2 y = g.obstacle().curve().position(t + 0.5 * 2.0 * kPi / 128.0);
        CHECK_THAT(g.g(y, x), WithinAbs(g.lambda0() * g.rho_value(x), 1e-4));
        CHECK(std::abs(g.g0(y, x)) < 1e-4);
    }
}

TEST_CASE("correction is small for a distant obstacle", "[green]") {
    const AssemblyPtr far = assemble(build_obstacle(Disk{{-8.0, kPi / 2.0}, 0.3}, 64));
    const Vec2 y{6.0, 1.0}, x{6.5, 2.0};
    CHECK(std::abs(far->g0(y, x) - gs(y, x)) < 1e-3);
}

TEST_CASE("Robin function asymptotes", "[green]") {
    const GreenAssembly& g = disk_assembly();
    CHECK(std::abs(g.robin({10.0, 1.0}) - hs_robin({10.0, 1.0})) < 1e-3);
    const AssemblyPtr small = assemble(build_obstacle(Disk{{0.0, kPi / 2.0}, 0.3}, 128));
    for (double d : {0.05, 0.02, 0.01}) {
        CHECK(std::abs(small->robin({2.0, d}) - std::log(1.0 / (2.0 * d)) / (2.0 * kPi)) < 0.5);
    }
}

TEST_CASE("Robin function equals the limit of the regular part", "[green]") {
    const GreenAssembly& g = disk_assembly();
    for (const Vec2 x : {Vec2{0.9, 1.2}, Vec2{-1.5, 2.4}}) {
        const double r = g.robin(x);
        CHECK_THAT(r, WithinAbs(g.robin_dirichlet(x) - g.lambda0() * std::pow(g.rho_value(x), 2), 1e-14));
        const double s = 1e-4;
        const double limit = 0.5 * (g.h_regular({x.x1 + s, x.x2}, x) + g.h_regular({x.x1 - s, x.x2}, x));
        CHECK_THAT(limit, WithinAbs(r, 1e-4));
    }
}

TEST_CASE("Robin function is refused in the collar", "[green]") {
    try {
        disk_assembly().robin({0.5 + 1e-4, kPi / 2.0});
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
    }
}

TEST_CASE("far-field coefficients of rho", "[green]") {
    const GreenAssembly& g = disk_assembly();
    const FarCoefficients c = g.far_coefficients();
    CHECK(c.plus > 0.0);
    CHECK(c.minus > 0.0);
    CHECK_THAT(c.plus, WithinRel(c.minus, 1e-6));
    // rho(x) ~ rho_+ sin x2 e^{-x1}.
    CHECK_THAT(g.rho_value({8.0, kPi / 2.0}) * std::exp(8.0), WithinRel(c.plus, 0.02));
}

TEST_CASE("rho from the normal derivative of G0", "[green]") {
    const GreenAssembly& g = disk_assembly();
    const ObstacleCurve& obs = g.obstacle();
    for (const Vec2 x : {Vec2{1.5, 1.0}, Vec2{-0.2, 2.6}, Vec2{4.0, 0.5}}) {
        const Eigen::VectorXd dn = g.g0_normal_derivative(x);
        double sum = 0.0;
        for (std::size_t i = 0; i < obs.size(); ++i) sum -= dn[static_cast<Eigen::Index>(i)] * obs[i].weight;
        CHECK_THAT(sum, WithinAbs(g.rho_value(x), 1e-3));
    }
}

TEST_CASE("far-field coefficients of G are bounded by rho", "[green]") {
    // C is fitted on the probes with |x1| >= 2 and must bound all twenty probes within a factor 3.
    const GreenAssembly& g = disk_assembly();
    double fitted = 0.0, worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Vec2 x{-4.0 + 0.4 * k, 1.5};
        if (g.obstacle().contains(x)) continue;
        const FarCoefficients c = g.c_coefficients(x);
        const double ratio = std::max(std::abs(c.plus), std::abs(c.minus)) / g.rho_value(x);
        if (std::abs(x.x1) >= 2.0) fitted = std::max(fitted, ratio);
        worst = std::max(worst, ratio);
    }
    CHECK(fitted > 0.0);
    CHECK(worst <= 3.0 * fitted);
}

TEST_CASE("correction cache is keyed by exact coordinates", "[green]") {
    const GreenAssembly& g = disk_assembly();
    g.clear_cache();
    g.correction({1.0, 1.0}, {2.0, 2.0});
    g.correction({1.5, 1.0}, {2.0, 2.0});
    CHECK(g.cache_size() == 1);
    g.correction({1.5, 1.0}, {2.0, std::nextafter(2.0, 3.0)});
    CHECK(g.cache_size() == 2);
}
