#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/patch_solver.hpp"
#include "strip_vortex/strip_kernel.hpp"

using namespace strip_vortex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double total_mass(const BathtubResult& bt, double area) {
    return std::accumulate(bt.omega.begin(), bt.omega.end(), 0.0) * area;
}

/// Shared window background at the critical circulation for the default disk.
const BackgroundField& window_background() {
    static const auto assembly = assemble(build_obstacle(Disk{{0.0, kPi / 2.0}, 0.5}, 128));
    static const BackgroundField field = [] {
        const double i_top = compute_top_flux(*assembly);
        return BackgroundField(assembly,
                               make_flow_config(*assembly, 1.0, critical_circulation(*assembly, 1.0, i_top), 0.05, i_top));
    }();
    return field;
}

}  // namespace

TEST_CASE("cell log average matches a fine midpoint sum", "[patch]") {
    const double h = 0.1;
    const int n = 400;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = ((i + 0.5) / n - 0.5) * h;
            const double y = ((j + 0.5) / n - 0.5) * h;
            sum += -std::log(std::hypot(x, y));
        }
    }
    CHECK_THAT(cell_log_average(h), WithinAbs(sum / (n * n), 1e-4));
}

TEST_CASE("bathtub picks the top cells of a single peak", "[patch]") {
    std::vector<double> psi(50);
    for (std::size_t k = 0; k < psi.size(); ++k) psi[k] = -std::abs(static_cast<double>(k) - 20.0) + 0.01 * k;
    const double area = 0.01;
    const double eps = std::sqrt(3.4 * area);
    const BathtubResult bt = bathtub_threshold(psi, area, eps);
    CHECK(bt.full_cells == 3);
    CHECK(bt.marginal_cells == 1);
    CHECK_THAT(total_mass(bt, area), WithinAbs(1.0, 1e-14));
    CHECK(bt.omega[20] == 1.0 / (eps * eps));
    CHECK_THAT(bt.fill, WithinAbs(0.4, 1e-12));
}

TEST_CASE("bathtub spreads mass over a plateau", "[patch]") {
    const std::vector<double> psi(40, 2.5);
    const double area = 0.01;
    const double eps = 0.1;
    const BathtubResult bt = bathtub_threshold(psi, area, eps);
    CHECK(bt.marginal_cells == 40);
    for (double w : bt.omega) CHECK_THAT(w, WithinRel(1.0 / (40 * area), 1e-14));
    CHECK_THAT(bt.fill, WithinRel(eps * eps / (40 * area), 1e-14));
}

TEST_CASE("bathtub splits two equal peaks evenly", "[patch]") {
    std::vector<double> psi(21);
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const double x = static_cast<double>(k) - 10.0;
        psi[k] = std::max(-std::abs(x - 5.0), -std::abs(x + 5.0));
    }
    const double area = 0.01;
    const double eps = std::sqrt(3.0 * area);
    const BathtubResult bt = bathtub_threshold(psi, area, eps);
    CHECK(bt.omega[5] == bt.omega[15]);
    CHECK(bt.omega[4] == bt.omega[16]);
    CHECK_THAT(total_mass(bt, area), WithinAbs(1.0, 1e-14));
}

TEST_CASE("bathtub rejects a region smaller than the patch", "[patch]") {
    const std::vector<double> psi(3, 1.0);
    try {
        bathtub_threshold(psi, 0.01, 0.2);
        FAIL("expected an infeasible error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
    }
}

TEST_CASE("iteration reaches the exhaustive optimum on synthetic instances", "[patch][oracle]") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        DenseKernelModel model = make_synthetic_model(12, 0.15, 0.02, seed);
        const double h = 1.0 / 12.0;
        const double eps = h * std::sqrt(2.5);
        const auto& cells = model.candidates();
        std::vector<double> green, eta;
        model.evaluate({}, green, eta);
        const auto best = static_cast<std::size_t>(std::min_element(eta.begin(), eta.end()) - eta.begin());
        const FixedPointResult fp = iterate_patch(model, eps, initial_disk(model, model.cell_center(cells[best]), eps), {});
        REQUIRE(fp.diagnostics.converged);
        CHECK(fp.diagnostics.self_consistent);
        CHECK(fp.diagnostics.max_energy_drop <= 1e-12);
        CHECK(fp.diagnostics.max_mass_error <= 1e-10);
        std::vector<double> omega(cells.size(), 0.0);
        for (const CellMass& cm : fp.state.support) omega[cm.cell] = cm.omega;
        CHECK_THAT(model.energy(omega), WithinAbs(fp.state.energy, 1e-12));
        CHECK_THAT(fp.state.energy, WithinAbs(brute_force_energy(model, eps), 1e-9));
    }
}

TEST_CASE("synthetic instances are reproducible", "[patch]") {
    const DenseKernelModel a = make_synthetic_model(6, 0.2, 0.05, 7);
    const DenseKernelModel b = make_synthetic_model(6, 0.2, 0.05, 7);
    CHECK(a.kernel() == b.kernel());
}

TEST_CASE("regime (i) patch converges near the landscape minimizer", "[patch][strip]") {
    const BackgroundField& bg = window_background();
    const RegionSpec region;
    const MinimizerRecord m = region_minimizer(bg, region, kPi / 128);
    const double h = kPi / 512;
    const PatchSolution sol = solve_patch(bg, region, h, 0.05, m.location, {m.location});
    const SolveReport& r = sol.report;
    CHECK(r.converged);
    CHECK(r.self_consistent);
    CHECK(r.max_mass_error <= 1e-10);
    CHECK(r.max_energy_drop <= 1e-12);
    CHECK(r.mu_floor_respected);
    CHECK(r.minimizer_distance < 4 * h);
    CHECK(std::abs(sol.state.mass() - 1.0) < 1e-10);
    // Exterior negativity holds for the converged state and fails once mu is pushed to -2 b pi.
    CHECK(verify_exterior_negativity(sol).passed);
    CHECK_FALSE(verify_exterior_negativity(sol, -2.0 * kPi).passed);
}

TEST_CASE("single cell potential follows the strip kernel far from the obstacle", "[patch][strip]") {
    const BackgroundField& bg = window_background();
    const RegionSpec region;
    const double h = kPi / 256;
    StripPatchModel model(bg, region, h, 0.05, {5.0, 1.2});
    const CellLattice& lat = model.lattice();
    const CellId cell = lat.id(lat.column_of(5.0), lat.row_of(1.2));
    const double omega = 1.0 / (h * h);
    const std::vector<CellMass> support{{cell, omega}};
    const Vec2 probe{7.0, 2.0};
    std::vector<double> green, eta;
    model.evaluate_points(support, {probe}, green, eta);
    CHECK_THAT(green[0], WithinAbs(gs(lat.center(cell), probe), 1e-3));
    CHECK(green[0] > 0.0);
}

TEST_CASE("layer solve rejects a patch larger than the layer", "[patch][strip]") {
    const BackgroundField& bg = window_background();
    RegionSpec region;
    region.kind = RegionKind::Layer;
    region.theta1 = 0.05;
    region.theta2 = 0.3;
    try {
        solve_patch(bg, region, kPi / 256, 0.2, {0.0, 1.2}, {});
        FAIL("expected an infeasible solve");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
    }
}
