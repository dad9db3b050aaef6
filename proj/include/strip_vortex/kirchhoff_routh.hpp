#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strip_vortex/background_flow.hpp"

namespace strip_vortex {

/// Components of the Kirchhoff-Routh function at one point.
struct LandscapeSample {
    double robin = 0.0;
    double eta = 0.0;
    double rho = 0.0;
    double value = 0.0;  // robin + 2 eta
};

/// Robin function plus twice the background stream function. Throws ErrorKind::Domain in the collar.
double evaluate_kr(const BackgroundField& background, Vec2 x);
LandscapeSample sample_kr(const BackgroundField& background, Vec2 x);

/// Batched evaluation; entries for points outside the fluid domain or in the collar are NaN.
std::vector<LandscapeSample> sample_kr_many(const BackgroundField& background, const std::vector<Vec2>& points);

enum class RegionKind { Window, Layer, Exterior };

const char* to_string(RegionKind kind);

struct RegionSpec {
    RegionKind kind = RegionKind::Window;
    double half_width = 8.0;  // window L
    double theta1 = 0.05;     // layer inner scaled distance
    double theta2 = 20.0;     // layer outer scaled distance
    double delta = 0.5;       // exterior exclusion distance
    std::size_t layer_distances = 64;
};

/// Tensor lattice of sample points: Cartesian (u = x1, v = x2) or boundary fitted
/// (u = curve parameter, v = distance along the fluid normal).
struct Lattice {
    enum class Kind { Cartesian, BoundaryFitted };
    Kind kind = Kind::Cartesian;
    std::vector<double> u;
    std::vector<double> v;
    bool periodic_u = false;
    const ObstacleCurve* curve = nullptr;

    std::size_t size() const { return u.size() * v.size(); }
    std::size_t index(std::size_t iu, std::size_t iv) const { return iu * v.size() + iv; }
    Vec2 point(std::size_t iu, std::size_t iv) const { return map(u[iu], v[iv]); }
    /// Point at fractional lattice indices, interpolating the node arrays linearly.
    Vec2 point_at(double fu, double fv) const;
    Vec2 map(double uu, double vv) const;
};

struct MinimizerRecord {
    RegionKind region = RegionKind::Window;
    std::size_t iu = 0;
    std::size_t iv = 0;
    Vec2 cell_point;
    Vec2 location;        // refined
    double value = 0.0;   // lattice value at the cell
    double distance = 0.0;         // to the obstacle boundary
    double scaled_distance = 0.0;  // distance times (b + lambda)
    double wall_distance = 0.0;
    bool degenerate = false;
};

class Landscape {
public:
    Lattice lattice;
    RegionKind region = RegionKind::Window;
    std::vector<double> values;  // NaN where not admissible
    double collar = 0.0;
    std::vector<MinimizerRecord> minimizers;

    bool evaluated(std::size_t k) const { return !std::isnan(values[k]); }
    std::size_t evaluated_count() const;
    double min_value() const;
    double max_value() const;
    /// Whether all eight lattice neighbours exist and were evaluated.
    bool has_full_ring(std::size_t iu, std::size_t iv) const;
    /// Discrete local minima with a full ring, within tol * range of the global minimum.
    std::vector<std::pair<std::size_t, std::size_t>> local_minima(double relative_tolerance = 1e-3) const;
    /// Best minimizer by value, if any.
    std::optional<MinimizerRecord> best() const;
};

struct RefinedPoint {
    Vec2 point;
    double du = 0.0;  // sub-cell offsets in index units
    double dv = 0.0;
    bool degenerate = false;
};

/// Quadratic fit over the 3x3 stencil; the vertex is clamped to the cell.
RefinedPoint refine_minimizer(const Landscape& landscape, std::size_t iu, std::size_t iv);

/// Evaluate the landscape over a region and record its minimizers. Throws ErrorKind::Region if empty.
Landscape scan(const BackgroundField& background, const RegionSpec& region, double h);

/// Lattices used by scan, exposed for reuse and tests.
Lattice window_lattice(const TruncatedGrid& grid);
Lattice layer_lattice(const ObstacleCurve& obstacle, double d_min, double d_max, std::size_t n_u,
                      std::size_t n_v);
Lattice exterior_lattice(double half_width, double h, double wall_scale);

/// Wall-layer minimizer height t0 of the far-field profile, cot t0 = 4 pi b.
double far_field_height(double b);

/// Minimum over the cross-sections |x1| in {L, L+1, L+2, L+3} at the grid rows.
double frame_minimum(const BackgroundField& background, double half_width, double h);

/// Minimum of the landscape over the shell at a fixed distance from the obstacle.
double shell_minimum(const BackgroundField& background, double distance, std::size_t n_u);

}  // namespace strip_vortex
