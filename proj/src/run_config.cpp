#include "strip_vortex/run_config.hpp"

#include <string>

#include "strip_vortex/errors.hpp"

namespace strip_vortex {

namespace {

void require(bool condition, const std::string& field, const std::string& rule) {
    if (!condition) fail(ErrorKind::Configuration, field + " " + rule);
}

void require_spacing(const Spacing& s, const std::string& field) {
    require(s.divisor >= 32, field, "must be pi/n with n >= 32");
}

}  // namespace

RegionSpec RunConfig::region_spec(RegionKind kind) const {
    RegionSpec spec;
    spec.kind = kind;
    spec.half_width = grid.half_width;
    spec.theta1 = regime.theta1;
    spec.theta2 = regime.theta2;
    spec.delta = regime.delta;
    return spec;
}

SolveOptions RunConfig::solve_options() const {
    SolveOptions options;
    options.max_iterations = solver.max_iterations;
    options.relaxation = solver.relaxation;
    options.mu_tolerance = solver.mu_tolerance;
    options.energy_tolerance = solver.energy_tolerance;
    return options;
}

void validate(const RunConfig& c) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>) {
                require(s.radius > 0.0, "obstacle.radius", "must be positive");
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                require(s.semi_a > 0.0 && s.semi_b > 0.0, "obstacle.semi_axes", "must be positive");
            } else {
                require(s.r0 > 0.0, "obstacle.r0", "must be positive");
            }
        },
        c.obstacle.shape);
    require(c.obstacle.panels >= 16, "obstacle.panels", "must be at least 16");

    require(c.grid.half_width > 0.0, "grid.half_width", "must be positive");
    require_spacing(c.grid.h, "grid.h");

    require(c.physics.b > 0.0, "physics.b", "must be positive");
    if (c.physics.gamma) require(*c.physics.gamma > 0.0, "physics.gamma", "must be positive or \"critical\"");
    require(!c.physics.eps.empty(), "physics.eps", "must list at least one value");
    for (double e : c.physics.eps) require(e > 0.0 && e < 1.0, "physics.eps", "values must lie in (0, 1)");

    require(c.regime.sigma > 0.0, "regime.sigma", "must be positive");
    require(c.regime.delta > 0.0, "regime.delta", "must be positive");
    require(c.regime.theta1 > 0.0, "regime.theta1", "must be positive");
    require(c.regime.theta2 > c.regime.theta1, "regime.theta2", "must exceed regime.theta1");

    require(c.solver.max_iterations >= 1, "solver.max_iterations", "must be at least 1");
    require(c.solver.relaxation > 0.0 && c.solver.relaxation <= 1.0, "solver.relaxation", "must lie in (0, 1]");
    require(c.solver.mu_tolerance > 0.0, "solver.mu_tolerance", "must be positive");
    require(c.solver.energy_tolerance > 0.0, "solver.energy_tolerance", "must be positive");
    require_spacing(c.solver.patch_h, "solver.patch_h");

    require(!c.checks.regime2_b.empty(), "checks.regime2_b", "must list at least one value");
    for (double b : c.checks.regime2_b) require(b > 0.0, "checks.regime2_b", "values must be positive");
    require(c.checks.layer_b > 0.0, "checks.layer_b", "must be positive");
    require(c.checks.large_panels >= 16, "checks.large_panels", "must be at least 16");
    require_spacing(c.checks.layer_patch_h, "checks.layer_patch_h");
    require(c.checks.symmetry_pairs >= 1, "checks.symmetry_pairs", "must be at least 1");
    require(c.checks.probes >= 1, "checks.probes", "must be at least 1");

    require(!c.landscape_regions.empty(), "landscape.regions", "must list at least one region");
    require(!c.output_dir.empty(), "output.dir", "must not be empty");
}

double resolve_gamma(const RunConfig& config, const GreenAssembly& assembly, double i_top) {
    if (config.physics.gamma) return *config.physics.gamma;
    return critical_circulation(assembly, config.physics.b, i_top);
}

}  // namespace strip_vortex
