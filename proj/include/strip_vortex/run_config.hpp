#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strip_vortex/kirchhoff_routh.hpp"
#include "strip_vortex/patch_solver.hpp"

namespace strip_vortex {

/// Grid spacing pi / n, stored by its integer divisor so that it conforms to the walls.
struct Spacing {
    std::size_t divisor = 128;

    double value() const { return kPi / static_cast<double>(divisor); }
    bool operator==(const Spacing&) const = default;
};

struct ObstacleSettings {
    ShapeDescriptor shape = Disk{{0.0, kPi / 2.0}, 0.5};
    std::size_t panels = 128;

    bool operator==(const ObstacleSettings&) const = default;
};

struct GridSettings {
    double half_width = 8.0;
    Spacing h{128};

    bool operator==(const GridSettings&) const = default;
};

struct PhysicsSettings {
    double b = 1.0;
    std::optional<double> gamma;  // empty selects the critical circulation b pi I_top
    std::vector<double> eps{0.1, 0.05, 0.025};

    bool operator==(const PhysicsSettings&) const = default;
};

struct RegimeSettings {
    double sigma = 0.05;
    double delta = 0.5;
    double theta1 = 0.05;
    double theta2 = 20.0;
    RegionKind region = RegionKind::Window;

    bool operator==(const RegimeSettings&) const = default;
};

struct SolverSettings {
    std::size_t max_iterations = 500;
    double relaxation = 1.0;
    double mu_tolerance = 1e-9;
    double energy_tolerance = 1e-12;
    Spacing patch_h{512};

    bool operator==(const SolverSettings&) const = default;
};

/// Parameters of the verification suite that are not part of a single run.
struct CheckSettings {
    std::vector<double> regime2_b{20.0, 40.0, 80.0};
    double layer_b = 40.0;  // far-field speed of the coexistence landscape and the layer patch
    std::size_t large_panels = 512;
    Spacing layer_patch_h{2048};
    std::size_t symmetry_pairs = 10000;
    std::size_t probes = 1000;

    bool operator==(const CheckSettings&) const = default;
};

/// Complete description of one invocation.
struct RunConfig {
    ObstacleSettings obstacle;
    GridSettings grid;
    PhysicsSettings physics;
    RegimeSettings regime;
    SolverSettings solver;
    CheckSettings checks;
    std::vector<RegionKind> landscape_regions{RegionKind::Window};
    std::string output_dir = "out";
    std::uint64_t seed = 20240607;

    bool operator==(const RunConfig&) const = default;

    RegionSpec region_spec(RegionKind kind) const;
    SolveOptions solve_options() const;
};

/// Throws ErrorKind::Configuration naming the first field that violates its invariant.
void validate(const RunConfig& config);

/// Circulation for the run: the configured value or b pi I_top when none is given.
double resolve_gamma(const RunConfig& config, const GreenAssembly& assembly, double i_top);

}  // namespace strip_vortex
