#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>

#include "strip_vortex/harmonic_bem.hpp"

namespace strip_vortex {

struct FarCoefficients {
    double plus = 0.0;   // coefficient of sin x2 e^{-x1} as x1 -> +inf
    double minus = 0.0;  // coefficient of sin x2 e^{x1} as x1 -> -inf
};

/// R(., x) written as -gs(., x*) + single layer of `tau`, where x* is the Kelvin image of x
/// across the osculating circle at the nearest boundary point. The image absorbs the
/// log peak of the boundary data when x is close to the obstacle; far away there is no image.
struct CorrectionDensity {
    bool has_image = false;
    Vec2 image;
    Eigen::VectorXd tau;
};

/// Green function of the fluid domain with constant (unknown) obstacle value and zero flux
/// normalization: G = G_S + R + lambda0 rho(y) rho(x).
class GreenAssembly {
public:
    explicit GreenAssembly(SolverPtr solver);
    GreenAssembly(const GreenAssembly&) = delete;
    GreenAssembly& operator=(const GreenAssembly&) = delete;

    const BoundarySolver& solver() const { return *solver_; }
    const SolverPtr& solver_ptr() const { return solver_; }
    const ObstacleCurve& obstacle() const { return solver_->obstacle(); }
    const HarmonicSolution& rho() const { return rho_; }

    /// Obstacle flux of rho, the integral of d rho/dn over the obstacle boundary.
    double obstacle_flux() const { return obstacle_flux_; }
    double lambda0() const { return 1.0 / obstacle_flux_; }
    double rho_value(Vec2 x) const { return rho_.value(x); }

    /// Width of the band around the obstacle where diagonal values are refused.
    double collar_width() const { return kCollarPanels * obstacle().max_panel_length(); }
    /// Sources closer than this to the obstacle use the image construction.
    double image_band() const { return kImagePanels * obstacle().max_panel_length(); }

    static constexpr double kCollarPanels = 1.0 / 64.0;
    static constexpr double kImagePanels = 12.0;
    /// Throws ErrorKind::Domain unless x is a fluid point outside the collar.
    void check_outside_collar(Vec2 x) const;

    /// Image point used for sources within the image band, if any.
    std::optional<Vec2> image_point(Vec2 source) const;
    /// Boundary data -gs(y_i, x) + gs(y_i, x*) of the remainder at the collocation points.
    Eigen::VectorXd correction_data(Vec2 source, const std::optional<Vec2>& image) const;
    /// Correction of R(., source), cached per exact source coordinates.
    std::shared_ptr<const CorrectionDensity> correction_density(Vec2 source) const;
    std::size_t cache_size() const;
    void clear_cache() const;

    /// Obstacle correction R(y, x) for the source x.
    double correction(Vec2 y, Vec2 x) const;
    double g0(Vec2 y, Vec2 x) const;
    double g(Vec2 y, Vec2 x) const;
    /// (1/2pi) ln(1/|y - x|) - G(y, x).
    double h_regular(Vec2 y, Vec2 x) const;
    /// Robin function H(x, x) = H_S(x, x) - R(x, x) - lambda0 rho(x)^2.
    double robin(Vec2 x) const;
    /// Robin function of the Dirichlet part, H_S(x, x) - R(x, x).
    double robin_dirichlet(Vec2 x) const;

    /// rho_+ and rho_- from boundary quadrature of e^{+-y1} sin y2 d rho/dn.
    FarCoefficients far_coefficients() const;
    /// Normal derivative of G0(., x) at each collocation point.
    Eigen::VectorXd g0_normal_derivative(Vec2 x) const;
    /// c_+(x), c_-(x): boundary quadrature of e^{+-y1} sin y2 dG(y, x)/dn_y over pi.
    FarCoefficients c_coefficients(Vec2 x) const;

private:
    using Key = std::pair<std::uint64_t, std::uint64_t>;

    SolverPtr solver_;
    HarmonicSolution rho_;
    double obstacle_flux_;
    mutable std::mutex cache_mutex_;
    mutable std::map<Key, std::shared_ptr<const CorrectionDensity>> cache_;
};

using AssemblyPtr = std::shared_ptr<const GreenAssembly>;

AssemblyPtr assemble(const ObstacleCurve& obstacle);
AssemblyPtr assemble(SolverPtr solver);

}  // namespace strip_vortex
