#include "strip_vortex/green_operator.hpp"

#include <bit>
#include <sstream>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/strip_kernel.hpp"

namespace strip_vortex {

namespace {

constexpr std::size_t kCacheLimit = 4096;

}  // namespace

GreenAssembly::GreenAssembly(SolverPtr solver)
    : solver_(std::move(solver)), rho_(solve_rho(solver_)), obstacle_flux_(rho_.charge()) {
    if (!(obstacle_flux_ > 0.0)) {
        fail(ErrorKind::Singular, "obstacle flux of rho is not positive");
    }
}

void GreenAssembly::check_outside_collar(Vec2 x) const {
    if (!(x.x2 > 0.0 && x.x2 < kPi) || obstacle().contains(x)) {
        fail(ErrorKind::Domain, "point is not in the fluid domain");
    }
    const ObstacleCurve& obs = obstacle();
    const double c = collar_width();
    const bool near_box = x.x1 > obs.min_x1() - c && x.x1 < obs.max_x1() + c && x.x2 > obs.min_x2() - c &&
                          x.x2 < obs.max_x2() + c;
    if (near_box && obs.distance(x).distance < c) {
        std::ostringstream msg;
        msg << "point (" << x.x1 << ", " << x.x2 << ") lies inside the obstacle collar";
        fail(ErrorKind::Domain, msg.str());
    }
}

std::optional<Vec2> GreenAssembly::image_point(Vec2 source) const {
    const ObstacleCurve& obs = obstacle();
    const double band = image_band();
    if (source.x1 < obs.min_x1() - band || source.x1 > obs.max_x1() + band || source.x2 < obs.min_x2() - band ||
        source.x2 > obs.max_x2() + band) {
        return std::nullopt;
    }
    const BoundaryDistance bd = obs.distance(source);
    if (bd.distance >= band) return std::nullopt;
    const double kappa = obs.curve().curvature(bd.parameter);
    // Mirror across the tangent line, or invert in the osculating circle where it bends inward.
    Vec2 image = source - (2.0 * bd.distance) * bd.inward;
    if (kappa * bd.distance > 1e-12) {
        const double radius = 1.0 / kappa;
        const Vec2 center = bd.foot - radius * bd.inward;
        const Vec2 rel = source - center;
        image = center + (radius * radius / dot(rel, rel)) * rel;
    }
    if (!obs.contains(image) || !(image.x2 > 0.0 && image.x2 < kPi)) return std::nullopt;
    return image;
}

Eigen::VectorXd GreenAssembly::correction_data(Vec2 source, const std::optional<Vec2>& image) const {
    Eigen::VectorXd data = -solver_->point_values(source);
    if (image) data += solver_->point_values(*image);
    return data;
}

std::shared_ptr<const CorrectionDensity> GreenAssembly::correction_density(Vec2 source) const {
    const Key key{std::bit_cast<std::uint64_t>(source.x1), std::bit_cast<std::uint64_t>(source.x2)};
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto density = std::make_shared<CorrectionDensity>();
    const std::optional<Vec2> image = image_point(source);
    density->has_image = image.has_value();
    if (image) density->image = *image;
    density->tau = solver_->solve_dirichlet(correction_data(source, image));
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_.size() >= kCacheLimit) cache_.clear();
    return cache_.emplace(key, std::shared_ptr<const CorrectionDensity>(std::move(density))).first->second;
}

std::size_t GreenAssembly::cache_size() const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    return cache_.size();
}

void GreenAssembly::clear_cache() const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cache_.clear();
}

double GreenAssembly::correction(Vec2 y, Vec2 x) const {
    const auto density = correction_density(x);
    double value = solver_->evaluate(density->tau, y);
    if (density->has_image) value -= gs_fast(y, density->image);
    return value;
}

double GreenAssembly::g0(Vec2 y, Vec2 x) const {
    return gs(y, x) + correction(y, x);
}

double GreenAssembly::g(Vec2 y, Vec2 x) const {
    return g0(y, x) + lambda0() * rho_value(y) * rho_value(x);
}

double GreenAssembly::h_regular(Vec2 y, Vec2 x) const {
    return -kInvTwoPi * std::log(norm(y - x)) - g(y, x);
}

double GreenAssembly::robin_dirichlet(Vec2 x) const {
    check_outside_collar(x);
    const std::optional<Vec2> image = image_point(x);
    const Eigen::VectorXd tau = solver_->solve_dirichlet(correction_data(x, image));
    double r = solver_->panel_integrals(x).dot(tau);
    if (image) r -= gs_fast(x, *image);
    return hs_robin(x) - r;
}

double GreenAssembly::robin(Vec2 x) const {
    const double r = rho_value(x);
    return robin_dirichlet(x) - lambda0() * r * r;
}

FarCoefficients GreenAssembly::far_coefficients() const {
    FarCoefficients out;
    const ObstacleCurve& obs = obstacle();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const Vec2 y = obs[i].mid;
        const double base = std::sin(y.x2) * rho_.normal_derivative(i) * obs[i].weight / kPi;
        out.plus += std::exp(y.x1) * base;
        out.minus += std::exp(-y.x1) * base;
    }
    return out;
}

Eigen::VectorXd GreenAssembly::g0_normal_derivative(Vec2 x) const {
    const auto density = correction_density(x);
    Eigen::VectorXd out = solver_->normal_derivative(density->tau);
    const ObstacleCurve& obs = obstacle();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        double dn = dot(grad_gs_fast(obs[i].mid, x), obs[i].normal);
        if (density->has_image) dn -= dot(grad_gs_fast(obs[i].mid, density->image), obs[i].normal);
        out[static_cast<Eigen::Index>(i)] += dn;
    }
    return out;
}

FarCoefficients GreenAssembly::c_coefficients(Vec2 x) const {
    const Eigen::VectorXd dg0 = g0_normal_derivative(x);
    const double rx = lambda0() * rho_value(x);
    FarCoefficients out;
    const ObstacleCurve& obs = obstacle();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const Vec2 y = obs[i].mid;
        const double dn = dg0[ii] + rx * rho_.normal_derivative(i);
        const double base = std::sin(y.x2) * dn * obs[i].weight / kPi;
        out.plus += std::exp(y.x1) * base;
        out.minus += std::exp(-y.x1) * base;
    }
    return out;
}

AssemblyPtr assemble(SolverPtr solver) {
    return std::make_shared<const GreenAssembly>(std::move(solver));
}

AssemblyPtr assemble(const ObstacleCurve& obstacle) {
    return assemble(make_solver(obstacle));
}

}  // namespace strip_vortex
