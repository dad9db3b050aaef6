#include "strip_vortex/background_flow.hpp"

#include <algorithm>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/quadrature.hpp"
#include "strip_vortex/strip_kernel.hpp"

namespace strip_vortex {

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::Subcritical: return "subcritical";
        case Regime::CriticalOrAbove: return "critical-or-above";
        case Regime::WindowIII: return "window-iii";
    }
    return "unknown";
}

WallFluxes compute_wall_fluxes(const GreenAssembly& assembly, double margin) {
    const ObstacleCurve& obs = assembly.obstacle();
    const Eigen::VectorXd& sigma = assembly.rho().density();
    const double lo = obs.min_x1() - margin;
    const double hi = obs.max_x1() + margin;
    // Resolve the wall footprint, whose width is set by the obstacle's distance to each wall.
    const double gap = std::min(obs.min_x2(), kPi - obs.max_x2());
    const double step = std::min(0.25, std::max(gap, 1e-3));
    const auto pieces = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    const double dx = (hi - lo) / static_cast<double>(pieces);

    auto wall_density = [&](double x1, bool top) {
        double sum = 0.0;
        for (std::size_t j = 0; j < obs.size(); ++j) {
            double panel = 0.0;
            for (const QuadNode& q : obs[j].gauss8) {
                panel += q.weight * (top ? top_wall_flux(q.point, x1) : bottom_wall_flux(q.point, x1));
            }
            sum += sigma[static_cast<Eigen::Index>(j)] * panel;
        }
        return sum;
    };

    WallFluxes out;
    for (std::size_t k = 0; k < pieces; ++k) {
        const double a = lo + dx * static_cast<double>(k);
        out.top += integrate_gauss([&](double x1) { return wall_density(x1, true); }, a, a + dx, 8);
        out.bottom += integrate_gauss([&](double x1) { return wall_density(x1, false); }, a, a + dx, 8);
    }
    const FarCoefficients far = assembly.far_coefficients();
    const double tail = far.plus * std::exp(-hi) + far.minus * std::exp(lo);
    out.top -= tail;
    out.bottom -= tail;
    return out;
}

double compute_top_flux(const GreenAssembly& assembly, double margin) {
    return -compute_wall_fluxes(assembly, margin).top;
}

double flux_constant(const GreenAssembly& assembly, double b, double gamma, double i_top) {
    return (gamma - b * kPi * i_top) / assembly.obstacle_flux();
}

double critical_circulation(const GreenAssembly&, double b, double i_top) {
    return b * kPi * i_top;
}

FlowConfig make_flow_config(const GreenAssembly& assembly, double b, double gamma, double sigma,
                            double i_top) {
    if (!(b > 0.0)) fail(ErrorKind::Configuration, "far-field speed b must be positive");
    if (!(sigma > 0.0)) fail(ErrorKind::Configuration, "regime window sigma must be positive");
    FlowConfig cfg;
    cfg.b = b;
    cfg.gamma = gamma;
    cfg.sigma = sigma;
    cfg.i_top = i_top;
    cfg.i_obs = assembly.obstacle_flux();
    cfg.lambda = flux_constant(assembly, b, gamma, i_top);
    const double ratio = gamma / b;
    if (ratio < kPi * i_top) {
        cfg.regime = Regime::Subcritical;
    } else if (ratio <= kPi * i_top + sigma * cfg.i_obs) {
        cfg.regime = Regime::WindowIII;
    } else {
        cfg.regime = Regime::CriticalOrAbove;
    }
    return cfg;
}

double flux_constant_oracle(const GreenAssembly& assembly, double b, double gamma) {
    const Eigen::VectorXd f = sample_boundary(assembly.obstacle(), [](Vec2 y) { return -y.x2; });
    const HarmonicSolution beta = solve_constrained(assembly.solver_ptr(), f, -gamma / b);
    return -b * beta.lambda();
}

BackgroundField::BackgroundField(AssemblyPtr assembly, FlowConfig config)
    : assembly_(std::move(assembly)), config_(config), xi_(solve_xi(assembly_->solver_ptr())) {
    eta_density_ = config_.b * xi_.density() + config_.lambda * assembly_->rho().density();
}

double BackgroundField::eta(Vec2 x) const {
    return config_.b * x.x2 - assembly_->solver().evaluate(eta_density_, x);
}

double BackgroundField::beta(Vec2 x) const {
    return -assembly_->solver().evaluate(eta_density_, x) / config_.b;
}

Vec2 BackgroundField::grad_eta(Vec2 x) const {
    return Vec2{0.0, config_.b} - assembly_->solver().evaluate_gradient(eta_density_, x);
}

Eigen::VectorXd BackgroundField::beta_plus_x2_normal_derivative() const {
    const ObstacleCurve& obs = assembly_->obstacle();
    const Eigen::VectorXd& dxi = xi_.normal_derivatives();
    const Eigen::VectorXd& drho = assembly_->rho().normal_derivatives();
    Eigen::VectorXd out(static_cast<Eigen::Index>(obs.size()));
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out[ii] = obs[i].normal.x2 - dxi[ii] - (config_.lambda / config_.b) * drho[ii];
    }
    return out;
}

Eigen::VectorXd BackgroundField::layer_slope() const {
    return -config_.b * beta_plus_x2_normal_derivative();
}

double BackgroundField::beta_abs_flux() const {
    return assembly_->solver().weights().dot(beta_plus_x2_normal_derivative().cwiseAbs());
}

double BackgroundField::beta_flux() const {
    const Eigen::VectorXd w = assembly_->solver().weights();
    return -w.dot(xi_.normal_derivatives()) - (config_.lambda / config_.b) * assembly_->obstacle_flux();
}

FarCoefficients BackgroundField::beta_far_coefficients() const {
    if (config_.lambda < 0.0) {
        fail(ErrorKind::Regime, "beta far-field coefficients need the critical-or-above regime (lambda >= 0)");
    }
    const ObstacleCurve& obs = assembly_->obstacle();
    const Eigen::VectorXd dn = beta_plus_x2_normal_derivative();
    FarCoefficients out;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const Vec2 y = obs[i].mid;
        const double base = -std::sin(y.x2) * dn[static_cast<Eigen::Index>(i)] * obs[i].weight / kPi;
        out.plus += std::exp(y.x1) * base;
        out.minus += std::exp(-y.x1) * base;
    }
    return out;
}

}  // namespace strip_vortex
