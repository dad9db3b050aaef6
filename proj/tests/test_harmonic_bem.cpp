#include <catch_amalgamated.hpp>

#include <random>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/green_operator.hpp"
#include "strip_vortex/harmonic_bem.hpp"

using namespace strip_vortex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Disk kDisk{{0.0, kPi / 2.0}, 0.5};

SolverPtr disk_solver(std::size_t panels) {
    return make_solver(build_obstacle(kDisk, panels));
}

Vec2 random_fluid_point(std::mt19937_64& rng, const ObstacleCurve& obs) {
    std::uniform_real_distribution<double> u1(-6.0, 6.0), u2(0.0, kPi);
    for (;;) {
        const Vec2 x{u1(rng), u2(rng)};
        if (x.x2 > 0.0 && !obs.contains(x) && obs.distance(x).distance > 1e-3) return x;
    }
}

}  // namespace

TEST_CASE("zero data gives the zero solution", "[bem]") {
    const auto solver = disk_solver(64);
    const HarmonicSolution u = solve_constrained(solver, Eigen::VectorXd::Zero(64), 0.0);
    CHECK(u.density().cwiseAbs().maxCoeff() == 0.0);
    CHECK(u.lambda() == 0.0);
    CHECK(u.value({1.0, 1.0}) == 0.0);
    CHECK_THAT(representation_check(u, {2.0, 1.5}), WithinAbs(0.0, 1e-12));
}

TEST_CASE("flux constraint fixes the flux constant", "[bem]") {
    // The obstacle flux of u equals the layer charge, so Lambda = -1 gives a negative level.
    double previous = 0.0;
    for (std::size_t panels : {64, 128, 256}) {
        const HarmonicSolution u = solve_constrained(disk_solver(panels), Eigen::VectorXd::Zero(panels), -1.0);
        CHECK(u.lambda() < 0.0);
        CHECK_THAT(u.flux(), WithinAbs(-1.0, 1e-6));
        CHECK_THAT(u.charge(), WithinAbs(-1.0, 1e-12));
        if (previous != 0.0) CHECK(std::abs(u.lambda() - previous) < 1e-4 * std::abs(u.lambda()));
        previous = u.lambda();
    }
}

TEST_CASE("rho lies strictly between zero and one", "[bem]") {
    const auto solver = disk_solver(128);
    const HarmonicSolution rho = solve_rho(solver);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 1000; ++k) {
        const double v = rho.value(random_fluid_point(rng, solver->obstacle()));
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    const double d = 1e-2 * solver->obstacle().diameter();
    CHECK(rho.value({0.5 + d, kPi / 2.0}) >= 0.9);
}

TEST_CASE("rho decays like e^-|x1|", "[bem]") {
    const HarmonicSolution rho = solve_rho(disk_solver(128));
    const double slope = (std::log(rho.value({12.0, kPi / 2.0})) - std::log(rho.value({6.0, kPi / 2.0}))) / 6.0;
    CHECK_THAT(slope, WithinAbs(-1.0, 0.02));
}

TEST_CASE("rho normal derivative and flux", "[bem]") {
    const HarmonicSolution rho = solve_rho(disk_solver(128));
    for (std::size_t i = 0; i < 128; ++i) CHECK(rho.normal_derivative(i) > 0.0);
    CHECK_THAT(rho.flux(), WithinRel(rho.charge(), 1e-6));
}

TEST_CASE("boundary residual converges faster than first order", "[bem]") {
    std::vector<double> res;
    for (std::size_t panels : {32, 64, 128, 256}) {
        res.push_back(boundary_residual(solve_rho(disk_solver(panels)), [](Vec2) { return 1.0; }));
    }
    for (std::size_t k = 1; k < res.size(); ++k) CHECK(std::log2(res[k - 1] / res[k]) >= 1.5);
}

TEST_CASE("representation formula reproduces rho", "[bem]") {
    const HarmonicSolution rho = solve_rho(disk_solver(128));
    CHECK_THAT(representation_check(rho, {2.0, 1.5}), WithinAbs(rho.value({2.0, 1.5}), 1e-4));
    try {
        representation_check(rho, {0.51, kPi / 2.0});
        FAIL("expected a near-singular quadrature error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NearSingularQuadrature);
    }
}

TEST_CASE("xi obeys the maximum principle and decays", "[bem]") {
    const auto solver = disk_solver(128);
    const HarmonicSolution xi = solve_xi(solver);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 200; ++k) {
        const double v = xi.value(random_fluid_point(rng, solver->obstacle()));
        CHECK(v > 0.0);
        CHECK(v < kPi);
    }
    CHECK(xi.value({10.0, kPi / 2.0}) < 1e-3);
    CHECK(xi.value({-10.0, kPi / 2.0}) < 1e-3);
}

TEST_CASE("xi plus its mirror image equals pi rho", "[bem]") {
    const auto solver = disk_solver(128);
    const HarmonicSolution xi = solve_xi(solver);
    const HarmonicSolution rho = solve_rho(solver);
    for (double t : {0.55, 0.6, 1.0}) {
        for (double x1 : {0.0, 0.7}) {
            const double sum = xi.value({x1, kPi / 2.0 + t}) + xi.value({x1, kPi / 2.0 - t});
            CHECK_THAT(sum, WithinAbs(kPi * rho.value({x1, kPi / 2.0 + t}), 1e-6));
        }
    }
}

TEST_CASE("rotated and refined panelizations agree", "[bem]") {
    const HarmonicSolution a = solve_rho(make_solver(build_obstacle(kDisk, 96, 0.37)));
    const HarmonicSolution b = solve_rho(make_solver(build_obstacle(kDisk, 128)));
    std::mt19937_64 rng(3);
    const ObstacleCurve obs = build_obstacle(kDisk, 64);
    for (int k = 0; k < 100; ++k) {
        Vec2 x = random_fluid_point(rng, obs);
        while (obs.distance(x).distance < 0.1) x = random_fluid_point(rng, obs);
        CHECK_THAT(a.value(x), WithinAbs(b.value(x), 1e-4));
    }
}

TEST_CASE("Dirichlet data stays within its range", "[bem]") {
    const auto solver = disk_solver(128);
    const Eigen::VectorXd f = sample_boundary(solver->obstacle(), [](Vec2 y) { return std::sin(3.0 * y.x1) + 0.5; });
    const HarmonicSolution u = solve_dirichlet(solver, f);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 200; ++k) {
        const double v = u.value(random_fluid_point(rng, solver->obstacle()));
        CHECK(v > -0.5 - 1e-6);
        CHECK(v < 1.5 + 1e-6);
    }
    CHECK(std::abs(u.value({13.0, kPi / 2.0})) < 1e-4 * 1.5);
}
