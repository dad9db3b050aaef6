#include "strip_vortex/kirchhoff_routh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/strip_kernel.hpp"

namespace strip_vortex {

namespace {

constexpr std::size_t kBatch = 256;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMinLayerNodes = 128;
constexpr double kWallGrowth = 1.15;

/// Admissible points: in the strip, outside the obstacle and its collar.
bool admissible(const GreenAssembly& assembly, Vec2 x) {
    if (!(x.x2 > 0.0 && x.x2 < kPi)) return false;
    try {
        assembly.check_outside_collar(x);
    } catch (const Error&) {
        return false;
    }
    return true;
}

LandscapeSample nan_sample() {
    return {kNaN, kNaN, kNaN, kNaN};
}

/// Linear interpolation of a node array at a fractional index.
double interpolate(const std::vector<double>& nodes, double f, bool periodic, double period) {
    const auto n = static_cast<long>(nodes.size());
    const double fl = std::floor(f);
    const long i = static_cast<long>(fl);
    const double s = f - fl;
    auto at = [&](long k) {
        if (periodic) {
            const long wraps = (k >= 0) ? k / n : -((-k + n - 1) / n);
            return nodes[static_cast<std::size_t>(k - wraps * n)] + static_cast<double>(wraps) * period;
        }
        if (k < 0) return nodes[0] + static_cast<double>(k) * (nodes[1] - nodes[0]);
        if (k >= n) {
            return nodes[static_cast<std::size_t>(n - 1)] +
                   static_cast<double>(k - n + 1) * (nodes[static_cast<std::size_t>(n - 1)] -
                                                     nodes[static_cast<std::size_t>(n - 2)]);
        }
        return nodes[static_cast<std::size_t>(k)];
    };
    return (1.0 - s) * at(i) + s * at(i + 1);
}

MinimizerRecord make_record(const BackgroundField& background, const Landscape& landscape, std::size_t iu,
                            std::size_t iv) {
    MinimizerRecord rec;
    rec.region = landscape.region;
    rec.iu = iu;
    rec.iv = iv;
    rec.cell_point = landscape.lattice.point(iu, iv);
    rec.value = landscape.values[landscape.lattice.index(iu, iv)];
    const RefinedPoint refined = refine_minimizer(landscape, iu, iv);
    rec.location = admissible(background.assembly(), refined.point) ? refined.point : rec.cell_point;
    rec.degenerate = refined.degenerate;
    rec.distance = background.assembly().obstacle().distance(rec.location).distance;
    rec.scaled_distance = rec.distance * (background.config().b + background.config().lambda);
    rec.wall_distance = std::min(rec.location.x2, kPi - rec.location.x2);
    return rec;
}

}  // namespace

LandscapeSample sample_kr(const BackgroundField& background, Vec2 x) {
    background.assembly().check_outside_collar(x);
    return sample_kr_many(background, {x}).front();
}

double evaluate_kr(const BackgroundField& background, Vec2 x) {
    return sample_kr(background, x).value;
}

std::vector<LandscapeSample> sample_kr_many(const BackgroundField& background, const std::vector<Vec2>& points) {
    const GreenAssembly& assembly = background.assembly();
    const BoundarySolver& solver = assembly.solver();
    const Eigen::VectorXd& sigma_rho = assembly.rho().density();
    const Eigen::VectorXd& sigma_eta = background.eta_density();
    const double lambda0 = assembly.lambda0();
    const double b = background.config().b;
    const auto p = static_cast<Eigen::Index>(solver.size());

    std::vector<LandscapeSample> out(points.size(), nan_sample());
    std::vector<std::size_t> active;
    std::vector<std::optional<Vec2>> images;
    for (std::size_t start = 0; start < points.size(); start += kBatch) {
        const std::size_t stop = std::min(points.size(), start + kBatch);
        active.clear();
        images.clear();
        for (std::size_t k = start; k < stop; ++k) {
            if (!admissible(assembly, points[k])) continue;
            active.push_back(k);
            images.push_back(assembly.image_point(points[k]));
        }
        if (active.empty()) continue;
        Eigen::MatrixXd data(p, static_cast<Eigen::Index>(active.size()));
        for (std::size_t a = 0; a < active.size(); ++a) {
            data.col(static_cast<Eigen::Index>(a)) = assembly.correction_data(points[active[a]], images[a]);
        }
        const Eigen::MatrixXd tau = solver.solve_dirichlet(data);
        for (std::size_t a = 0; a < active.size(); ++a) {
            const Vec2 x = points[active[a]];
            const Eigen::VectorXd integrals = solver.panel_integrals(x);
            double r = integrals.dot(tau.col(static_cast<Eigen::Index>(a)));
            if (images[a]) r -= gs_fast(x, *images[a]);
            LandscapeSample s;
            s.rho = integrals.dot(sigma_rho);
            s.robin = hs_robin(x) - r - lambda0 * s.rho * s.rho;
            s.eta = b * x.x2 - integrals.dot(sigma_eta);
            s.value = s.robin + 2.0 * s.eta;
            out[active[a]] = s;
        }
    }
    return out;
}

const char* to_string(RegionKind kind) {
    switch (kind) {
        case RegionKind::Window: return "window";
        case RegionKind::Layer: return "layer";
        case RegionKind::Exterior: return "exterior";
    }
    return "unknown";
}

Vec2 Lattice::map(double uu, double vv) const {
    if (kind == Kind::Cartesian) return {uu, vv};
    const ParametricCurve& c = curve->curve();
    const Vec2 tangent = c.derivative(uu);
    const double speed = norm(tangent);
    const Vec2 inward{tangent.x2 / speed, -tangent.x1 / speed};
    return c.position(uu) + vv * inward;
}

Vec2 Lattice::point_at(double fu, double fv) const {
    const double period = (kind == Kind::BoundaryFitted) ? 2.0 * kPi : 0.0;
    return map(interpolate(u, fu, periodic_u, period), interpolate(v, fv, false, 0.0));
}

std::size_t Landscape::evaluated_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return !std::isnan(v); }));
}

double Landscape::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (!std::isnan(v)) m = std::min(m, v);
    }
    return m;
}

double Landscape::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (!std::isnan(v)) m = std::max(m, v);
    }
    return m;
}

bool Landscape::has_full_ring(std::size_t iu, std::size_t iv) const {
    const auto nu = static_cast<long>(lattice.u.size());
    const auto nv = static_cast<long>(lattice.v.size());
    for (long du = -1; du <= 1; ++du) {
        for (long dv = -1; dv <= 1; ++dv) {
            long ju = static_cast<long>(iu) + du;
            const long jv = static_cast<long>(iv) + dv;
            if (lattice.periodic_u) ju = (ju + nu) % nu;
            if (ju < 0 || ju >= nu || jv < 0 || jv >= nv) return false;
            if (!evaluated(lattice.index(static_cast<std::size_t>(ju), static_cast<std::size_t>(jv)))) return false;
        }
    }
    return true;
}

std::vector<std::pair<std::size_t, std::size_t>> Landscape::local_minima(double relative_tolerance) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (evaluated_count() == 0) return out;
    const double lo = min_value();
    const double threshold = lo + relative_tolerance * std::max(max_value() - lo, 1e-300);
    const auto nu = static_cast<long>(lattice.u.size());
    for (std::size_t iu = 0; iu < lattice.u.size(); ++iu) {
        for (std::size_t iv = 0; iv < lattice.v.size(); ++iv) {
            const double f = values[lattice.index(iu, iv)];
            if (std::isnan(f) || f > threshold || !has_full_ring(iu, iv)) continue;
            bool is_min = true;
            for (long du = -1; du <= 1 && is_min; ++du) {
                for (long dv = -1; dv <= 1; ++dv) {
                    long ju = static_cast<long>(iu) + du;
                    if (lattice.periodic_u) ju = (ju + nu) % nu;
                    const auto jv = static_cast<std::size_t>(static_cast<long>(iv) + dv);
                    if (values[lattice.index(static_cast<std::size_t>(ju), jv)] < f) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (is_min) out.emplace_back(iu, iv);
        }
    }
    return out;
}

std::optional<MinimizerRecord> Landscape::best() const {
    if (minimizers.empty()) return std::nullopt;
    return *std::min_element(minimizers.begin(), minimizers.end(),
                             [](const MinimizerRecord& a, const MinimizerRecord& b) { return a.value < b.value; });
}

RefinedPoint refine_minimizer(const Landscape& landscape, std::size_t iu, std::size_t iv) {
    const Lattice& lat = landscape.lattice;
    if (!landscape.has_full_ring(iu, iv)) {
        fail(ErrorKind::Precondition, "refinement needs all eight neighbours");
    }
    const auto nu = static_cast<long>(lat.u.size());
    double f[3][3];
    for (int a = 0; a < 3; ++a) {
        for (int c = 0; c < 3; ++c) {
            long ju = static_cast<long>(iu) + a - 1;
            if (lat.periodic_u) ju = (ju + nu) % nu;
            const auto jv = static_cast<std::size_t>(static_cast<long>(iv) + c - 1);
            f[a][c] = landscape.values[lat.index(static_cast<std::size_t>(ju), jv)];
        }
    }
    // Least-squares quadratic on the 3x3 stencil, exact for quadratics.
    double gu = 0.0, gv = 0.0, huu = 0.0, hvv = 0.0;
    for (int k = 0; k < 3; ++k) {
        gu += (f[2][k] - f[0][k]) / 6.0;
        gv += (f[k][2] - f[k][0]) / 6.0;
        huu += (f[2][k] - 2.0 * f[1][k] + f[0][k]) / 3.0;
        hvv += (f[k][2] - 2.0 * f[k][1] + f[k][0]) / 3.0;
    }
    const double huv = (f[2][2] - f[2][0] - f[0][2] + f[0][0]) / 4.0;
    const double det = huu * hvv - huv * huv;
    const double scale = std::max({std::abs(huu), std::abs(hvv), std::abs(huv), 1e-300});
    RefinedPoint out;
    if (!(huu > 0.0) || !(det > 1e-12 * scale * scale)) {
        out.degenerate = true;
    } else {
        out.du = std::clamp(-(hvv * gu - huv * gv) / det, -0.5, 0.5);
        out.dv = std::clamp(-(huu * gv - huv * gu) / det, -0.5, 0.5);
    }
    out.point = lat.point_at(static_cast<double>(iu) + out.du, static_cast<double>(iv) + out.dv);
    return out;
}

Lattice window_lattice(const TruncatedGrid& grid) {
    Lattice lat;
    lat.kind = Lattice::Kind::Cartesian;
    for (std::size_t i = 0; i < grid.n1(); ++i) lat.u.push_back(grid.x1(i));
    for (std::size_t j = 0; j < grid.n2(); ++j) lat.v.push_back(grid.x2(j));
    return lat;
}

Lattice layer_lattice(const ObstacleCurve& obstacle, double d_min, double d_max, std::size_t n_u,
                      std::size_t n_v) {
    if (!(d_min > 0.0 && d_max > d_min) || n_u < 3 || n_v < 3) {
        fail(ErrorKind::Precondition, "layer lattice needs 0 < d_min < d_max and at least 3 nodes per direction");
    }
    Lattice lat;
    lat.kind = Lattice::Kind::BoundaryFitted;
    lat.periodic_u = true;
    lat.curve = &obstacle;
    for (std::size_t k = 0; k < n_u; ++k) lat.u.push_back(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_u));
    const double ratio = std::log(d_max / d_min);
    for (std::size_t k = 0; k < n_v; ++k) {
        lat.v.push_back(d_min * std::exp(ratio * (static_cast<double>(k) + 0.5) / static_cast<double>(n_v)));
    }
    return lat;
}

Lattice exterior_lattice(double half_width, double h, double wall_scale) {
    Lattice lat;
    lat.kind = Lattice::Kind::Cartesian;
    const auto n1 = static_cast<std::size_t>(std::floor(2.0 * half_width / h));
    for (std::size_t i = 0; i < n1; ++i) {
        lat.u.push_back((static_cast<double>(i) - 0.5 * static_cast<double>(n1 - 1)) * h);
    }
    std::vector<double> lower;
    if (wall_scale < 4.0 * h) {
        // Geometric rows from well below the wall-layer height up to spacing h.
        double x = wall_scale / 8.0;
        while (x * (kWallGrowth - 1.0) < h && x < 0.5 * kPi) {
            lower.push_back(x);
            x *= kWallGrowth;
        }
        for (; x < 0.5 * kPi - 0.25 * h; x += h) lower.push_back(x);
    } else {
        for (double x = 0.5 * h; x < 0.5 * kPi - 0.25 * h; x += h) lower.push_back(x);
    }
    lat.v = lower;
    lat.v.push_back(0.5 * kPi);
    for (auto it = lower.rbegin(); it != lower.rend(); ++it) lat.v.push_back(kPi - *it);
    return lat;
}

double far_field_height(double b) {
    if (!(b > 0.0)) fail(ErrorKind::Configuration, "far-field speed must be positive");
    return std::atan(1.0 / (4.0 * kPi * b));
}

Landscape scan(const BackgroundField& background, const RegionSpec& region, double h) {
    const GreenAssembly& assembly = background.assembly();
    const ObstacleCurve& obs = assembly.obstacle();
    const double b = background.config().b;
    const double speed = b + background.config().lambda;

    Landscape land;
    land.region = region.kind;
    land.collar = assembly.collar_width();
    switch (region.kind) {
        case RegionKind::Window:
            land.lattice = window_lattice(build_grid(obs, region.half_width, h));
            break;
        case RegionKind::Layer: {
            if (!(speed > 0.0)) fail(ErrorKind::Regime, "layer scan needs b + lambda > 0");
            const auto n_u = std::max(kMinLayerNodes, static_cast<std::size_t>(std::ceil(obs.perimeter() / h)));
            land.lattice = layer_lattice(obs, region.theta1 / speed, region.theta2 / speed, n_u, region.layer_distances);
            break;
        }
        case RegionKind::Exterior:
            land.lattice = exterior_lattice(region.half_width, h, far_field_height(b));
            break;
    }

    const Lattice& lat = land.lattice;
    std::vector<Vec2> points;
    std::vector<std::size_t> index;
    points.reserve(lat.size());
    for (std::size_t iu = 0; iu < lat.u.size(); ++iu) {
        for (std::size_t iv = 0; iv < lat.v.size(); ++iv) {
            const Vec2 x = lat.point(iu, iv);
            bool keep = x.x2 > 0.0 && x.x2 < kPi && !obs.contains(x);
            if (keep && region.kind == RegionKind::Layer) {
                // Keep points whose normal segment is a shortest path to the boundary.
                const double d = lat.v[iv];
                keep = std::abs(obs.distance(x).distance - d) <= 1e-6 * d + 1e-12;
            }
            if (keep && region.kind == RegionKind::Exterior) keep = obs.distance(x).distance > region.delta;
            if (!keep) continue;
            points.push_back(x);
            index.push_back(lat.index(iu, iv));
        }
    }
    land.values.assign(lat.size(), kNaN);
    const std::vector<LandscapeSample> samples = sample_kr_many(background, points);
    for (std::size_t k = 0; k < points.size(); ++k) land.values[index[k]] = samples[k].value;
    if (land.evaluated_count() == 0) {
        fail(ErrorKind::Region, std::string("no admissible points in the ") + to_string(region.kind) + " region");
    }
    for (const auto& [iu, iv] : land.local_minima()) {
        land.minimizers.push_back(make_record(background, land, iu, iv));
    }
    return land;
}

double frame_minimum(const BackgroundField& background, double half_width, double h) {
    const std::size_t rows = cells_across_strip(h);
    std::vector<Vec2> points;
    for (double offset : {0.0, 1.0, 2.0, 3.0}) {
        for (double side : {-1.0, 1.0}) {
            for (std::size_t j = 0; j < rows; ++j) {
                points.push_back({side * (half_width + offset), (static_cast<double>(j) + 0.5) * h});
            }
        }
    }
    double m = std::numeric_limits<double>::infinity();
    for (const LandscapeSample& s : sample_kr_many(background, points)) {
        if (!std::isnan(s.value)) m = std::min(m, s.value);
    }
    return m;
}

double shell_minimum(const BackgroundField& background, double distance, std::size_t n_u) {
    const ObstacleCurve& obs = background.assembly().obstacle();
    const Lattice lat = layer_lattice(obs, 0.5 * distance, 2.0 * distance, n_u, 3);
    std::vector<Vec2> points;
    for (std::size_t k = 0; k < n_u; ++k) {
        const Vec2 x = lat.map(lat.u[k], distance);
        if (std::abs(obs.distance(x).distance - distance) <= 1e-6 * distance + 1e-12) points.push_back(x);
    }
    double m = std::numeric_limits<double>::infinity();
    for (const LandscapeSample& s : sample_kr_many(background, points)) {
        if (!std::isnan(s.value)) m = std::min(m, s.value);
    }
    return m;
}

}  // namespace strip_vortex
