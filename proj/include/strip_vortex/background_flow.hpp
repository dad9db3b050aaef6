#pragma once

#include <string>

#include "strip_vortex/green_operator.hpp"

namespace strip_vortex {

enum class Regime { Subcritical, CriticalOrAbove, WindowIII };

const char* to_string(Regime regime);

/// Physical flow parameters with the derived flux constant and regime tag.
struct FlowConfig {
    double b = 1.0;          // far-field speed
    double gamma = 0.0;      // circulation around the obstacle
    double sigma = 0.05;     // width of the regime-(iii) circulation window
    double lambda = 0.0;     // flux constant lambda_{b,Gamma}
    double i_top = 0.0;      // |d rho/dn| integrated over the top wall
    double i_obs = 0.0;      // d rho/dn integrated over the obstacle boundary
    Regime regime = Regime::Subcritical;
};

struct WallFluxes {
    double top = 0.0;     // signed outward flux of rho through x2 = pi
    double bottom = 0.0;  // signed outward flux of rho through x2 = 0
};

/// Signed outward fluxes of rho through both walls, integrated over the whole line.
/// `margin` sets the quadrature window beyond the obstacle; the tail is added analytically.
WallFluxes compute_wall_fluxes(const GreenAssembly& assembly, double margin = 25.0);

/// I_top, the integral of |d rho/dn| over the top wall.
double compute_top_flux(const GreenAssembly& assembly, double margin = 25.0);

/// lambda_{b,Gamma} = (Gamma - b pi I_top) / I_obs.
double flux_constant(const GreenAssembly& assembly, double b, double gamma, double i_top);

/// Circulation b pi I_top at which the flux constant vanishes.
double critical_circulation(const GreenAssembly& assembly, double b, double i_top);

/// Derive lambda, I_top, I_obs and the regime tag. Throws ErrorKind::Configuration if b <= 0.
FlowConfig make_flow_config(const GreenAssembly& assembly, double b, double gamma, double sigma,
                            double i_top);

/// Flux constant from one constrained solve for beta (independent of I_top).
double flux_constant_oracle(const GreenAssembly& assembly, double b, double gamma);

/// Background stream function eta = b (x2 + beta), beta = -xi - (lambda/b) rho.
class BackgroundField {
public:
    BackgroundField(AssemblyPtr assembly, FlowConfig config);

    const GreenAssembly& assembly() const { return *assembly_; }
    const AssemblyPtr& assembly_ptr() const { return assembly_; }
    const FlowConfig& config() const { return config_; }
    const HarmonicSolution& xi() const { return xi_; }

    double eta(Vec2 x) const;
    double beta(Vec2 x) const;
    Vec2 grad_eta(Vec2 x) const;
    double xi_value(Vec2 x) const { return xi_.value(x); }

    /// Density of the layer part: eta = b x2 - (layer potential of this density).
    const Eigen::VectorXd& eta_density() const { return eta_density_; }

    /// d(beta + x2)/dn at each collocation point.
    Eigen::VectorXd beta_plus_x2_normal_derivative() const;
    /// A(x) = b d(xi - x2)/dn + lambda d rho/dn at each collocation point.
    Eigen::VectorXd layer_slope() const;
    /// Integral of |d(beta + x2)/dn| over the obstacle boundary.
    double beta_abs_flux() const;
    /// Integral of d beta/dn over the obstacle boundary.
    double beta_flux() const;

    /// beta_+ and beta_-; throws ErrorKind::Regime when lambda < 0.
    FarCoefficients beta_far_coefficients() const;

private:
    AssemblyPtr assembly_;
    FlowConfig config_;
    HarmonicSolution xi_;
    Eigen::VectorXd eta_density_;
};

}  // namespace strip_vortex
