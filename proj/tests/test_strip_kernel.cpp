#include <catch_amalgamated.hpp>

#include <random>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/strip_kernel.hpp"

using namespace strip_vortex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("kernel vanishes on the bottom wall", "[kernel]") {
    CHECK_THAT(gs({1.0, 1e-9}, {0.0, kPi / 2.0}), WithinAbs(0.0, 1e-8));
}

TEST_CASE("kernel is symmetric", "[kernel]") {
    CHECK_THAT(gs({0.3, 1.0}, {1.2, 2.0}), WithinAbs(gs({1.2, 2.0}, {0.3, 1.0}), 1e-14));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u1(-10.0, 10.0), u2(1e-6, kPi - 1e-6);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const Vec2 y{u1(rng), u2(rng)}, x{u1(rng), u2(rng)};
        worst = std::max(worst, std::abs(gs(y, x) - gs(x, y)));
        CHECK(gs(y, x) > 0.0);
    }
    CHECK(worst <= 1e-13);
}

TEST_CASE("kernel far field", "[kernel]") {
    CHECK_THAT(gs({0.0, kPi / 2.0}, {10.0, kPi / 2.0}) * kPi * std::exp(10.0), WithinAbs(1.0, 1e-4));
    const Vec2 y{0.0, 1.0}, x{8.0, 2.0};
    CHECK(std::abs(gs(y, x) - gs_far_field(y, x)) / gs(y, x) < 10.0 * std::exp(-8.0));
    const double small = gs_far_field({0.0, 1e-3}, {8.0, 2.0});
    CHECK_THAT(small / gs_far_field({0.0, 2e-3}, {8.0, 2.0}), WithinRel(0.5, 1e-5));
    try {
        gs_far_field({0.0, 1.0}, {4.0, 1.0});
        FAIL("expected a precondition error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Precondition);
    }
}

TEST_CASE("log1p and two-log forms agree", "[kernel]") {
    for (double d : {0.01, 0.5, 3.0, 12.0}) {
        const Vec2 y{d, 1.1}, x{0.0, 2.3};
        CHECK_THAT(gs(y, x), WithinRel(gs_two_log(y, x), 1e-10));
    }
    CHECK(gs({60.0, 1.0}, {0.0, 2.0}) > 0.0);
}

TEST_CASE("kernel input errors", "[kernel]") {
    auto kind = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Io;
    };
    CHECK(kind([] { gs({0.0, 1.0}, {0.0, 1.0}); }) == ErrorKind::Singular);
    CHECK(kind([] { gs({0.0, -0.1}, {0.0, 1.0}); }) == ErrorKind::Domain);
    CHECK(kind([] { hs_robin({0.0, 4.0}); }) == ErrorKind::Domain);
}

TEST_CASE("gradient matches finite differences", "[kernel]") {
    const Vec2 y{0.4, 1.1}, x{1.0, 2.2};
    const double s = 1e-6;
    const Vec2 g = grad_gs(y, x);
    CHECK_THAT(g.x1, WithinAbs((gs({y.x1 + s, y.x2}, x) - gs({y.x1 - s, y.x2}, x)) / (2 * s), 1e-6));
    CHECK_THAT(g.x2, WithinAbs((gs({y.x1, y.x2 + s}, x) - gs({y.x1, y.x2 - s}, x)) / (2 * s), 1e-6));
    const Vec2 a = grad_gs({0.3, 1.0}, {0.0, 1.0});
    const Vec2 b = grad_gs({-0.3, 1.0}, {0.0, 1.0});
    CHECK_THAT(a.x1, WithinAbs(-b.x1, 1e-15));
    CHECK(std::abs(grad_gs({0.5, 1e-9}, {0.0, 1.0}).x1) < 1e-8);
}

TEST_CASE("strip Robin function", "[kernel]") {
    CHECK_THAT(hs_robin({0.0, kPi / 2.0}), WithinAbs(-std::log(2.0) / (2.0 * kPi), 1e-15));
    CHECK_THAT(hs_robin({0.0, kPi / 6.0}), WithinAbs(0.0, 1e-15));
    const double d = 1e-3;
    CHECK(std::abs(std::log(1.0 / (2.0 * d)) / (2.0 * kPi) - hs_robin({0.0, d})) < 1e-3);
    CHECK_THAT(hs_regular({0.2, 1.0}, {0.2, 1.0}), WithinAbs(hs_robin({0.2, 1.0}), 1e-15));
}

TEST_CASE("kernel is discretely harmonic at second order", "[kernel]") {
    const Vec2 x{0.0, 1.0}, p{0.7, 1.6};
    auto residual = [&](double h) {
        return std::abs(gs({p.x1 + h, p.x2}, x) + gs({p.x1 - h, p.x2}, x) + gs({p.x1, p.x2 + h}, x) +
                        gs({p.x1, p.x2 - h}, x) - 4.0 * gs(p, x)) /
               (h * h);
    };
    CHECK(std::log2(residual(0.02) / residual(0.01)) > 1.9);
}

TEST_CASE("far-field decay rate", "[kernel]") {
    const Vec2 y{0.0, kPi / 2.0};
    const double slope = (std::log(gs(y, {14.0, kPi / 2.0})) - std::log(gs(y, {6.0, kPi / 2.0}))) / 8.0;
    CHECK_THAT(slope, WithinAbs(-1.0, 0.01));
}
