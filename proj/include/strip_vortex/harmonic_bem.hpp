#pragma once

#include <functional>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "strip_vortex/geometry.hpp"

namespace strip_vortex {

/// Integral of gs(y, x) over panel j in y, for a target x off that panel.
double panel_potential(const ParametricCurve& curve, const Panel& panel, Vec2 x);

/// Integral of the x-gradient of gs(y, x) over panel j in y.
Vec2 panel_gradient(const ParametricCurve& curve, const Panel& panel, Vec2 x);

/// Integral of the y-normal derivative of gs(y, x) over the panel (double-layer density 1).
double panel_double_layer(const ParametricCurve& curve, const Panel& panel, Vec2 x);

/// Self-panel integral of gs(y, mid) with the logarithm integrated analytically.
double self_potential(const ParametricCurve& curve, const Panel& panel);

/// Self-panel integral of d gs(y, x)/d n_x at x = mid (smooth integrand).
double self_normal_derivative(const ParametricCurve& curve, const Panel& panel);

/// Assembled single-layer operators for one obstacle: collocation matrix A,
/// normal-derivative matrix D, and factorizations of the plain and constrained systems.
class BoundarySolver {
public:
    explicit BoundarySolver(ObstacleCurve obstacle);

    const ObstacleCurve& obstacle() const { return obstacle_; }
    std::size_t size() const { return obstacle_.size(); }
    const Eigen::MatrixXd& single_layer() const { return a_; }
    const Eigen::MatrixXd& normal_operator() const { return d_; }
    Eigen::VectorXd weights() const;
    /// Reciprocal condition estimates of the Dirichlet and constrained systems.
    double rcond_dirichlet() const { return rcond_a_; }
    double rcond_constrained() const { return rcond_m_; }

    /// Solve A sigma = f.
    Eigen::VectorXd solve_dirichlet(const Eigen::VectorXd& f) const;
    /// Solve A S = F for several right-hand sides at once.
    Eigen::MatrixXd solve_dirichlet(const Eigen::MatrixXd& f) const;
    /// Solve A^T z = r.
    Eigen::VectorXd solve_dirichlet_transpose(const Eigen::VectorXd& r) const;
    /// Solve A sigma - lambda = f with sum w sigma = charge; returns (sigma, lambda).
    std::pair<Eigen::VectorXd, double> solve_constrained(const Eigen::VectorXd& f, double charge) const;

    /// Panel integrals I_j(x) of gs(., x) for every panel j.
    Eigen::VectorXd panel_integrals(Vec2 x) const;
    /// Point values gs(y_j, x) at every collocation point.
    Eigen::VectorXd point_values(Vec2 x) const;

    double evaluate(const Eigen::VectorXd& sigma, Vec2 x) const;
    Vec2 evaluate_gradient(const Eigen::VectorXd& sigma, Vec2 x) const;
    /// Exterior normal derivative at the collocation points: sigma/2 + D sigma.
    Eigen::VectorXd normal_derivative(const Eigen::VectorXd& sigma) const;

private:
    ObstacleCurve obstacle_;
    Eigen::MatrixXd a_;
    Eigen::MatrixXd d_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_a_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_m_;
    double rcond_a_ = 0.0;
    double rcond_m_ = 0.0;
};

using SolverPtr = std::shared_ptr<const BoundarySolver>;

SolverPtr make_solver(ObstacleCurve obstacle);

/// Layer density plus flux constant for one harmonic problem on the fluid domain.
class HarmonicSolution {
public:
    HarmonicSolution(SolverPtr solver, Eigen::VectorXd sigma, double lambda, Eigen::VectorXd boundary_data);

    const BoundarySolver& solver() const { return *solver_; }
    const SolverPtr& solver_ptr() const { return solver_; }
    const Eigen::VectorXd& density() const { return sigma_; }
    double lambda() const { return lambda_; }
    /// Prescribed boundary value f + lambda at each collocation point.
    const Eigen::VectorXd& trace() const { return trace_; }
    const Eigen::VectorXd& normal_derivatives() const { return dn_; }
    /// Total layer charge sum sigma_j w_j; equals the flux of u through the obstacle boundary.
    double charge() const;
    /// Quadrature of the normal derivative over the obstacle boundary.
    double flux() const;

    double value(Vec2 x) const { return solver_->evaluate(sigma_, x); }
    Vec2 gradient(Vec2 x) const { return solver_->evaluate_gradient(sigma_, x); }
    double normal_derivative(std::size_t i) const { return dn_[static_cast<Eigen::Index>(i)]; }

private:
    SolverPtr solver_;
    Eigen::VectorXd sigma_;
    double lambda_;
    Eigen::VectorXd trace_;
    Eigen::VectorXd dn_;
};

using BoundaryFunction = std::function<double(Vec2)>;

/// Sample a boundary function at the collocation points.
Eigen::VectorXd sample_boundary(const ObstacleCurve& obstacle, const BoundaryFunction& f);

/// Harmonic u with u = f + lambda on the obstacle, zero walls, decay, and obstacle flux Lambda.
HarmonicSolution solve_constrained(const SolverPtr& solver, const Eigen::VectorXd& f, double flux);
HarmonicSolution solve_constrained(const ObstacleCurve& obstacle, const BoundaryFunction& f, double flux);

/// Harmonic u with u = f on the obstacle (no flux constraint).
HarmonicSolution solve_dirichlet(const SolverPtr& solver, const Eigen::VectorXd& f);

/// Capacity potential: 1 on the obstacle, 0 on the walls.
HarmonicSolution solve_rho(const SolverPtr& solver);

/// Harmonic extension of x2 from the obstacle with zero walls.
HarmonicSolution solve_xi(const SolverPtr& solver);

/// Green representation integral of u at x from its boundary trace and normal derivative.
/// Throws ErrorKind::NearSingularQuadrature within two panel lengths of the obstacle.
double representation_check(const HarmonicSolution& sol, Vec2 x);

/// Largest |u - (f + lambda)| at the panel end nodes, i.e. between collocation points.
double boundary_residual(const HarmonicSolution& sol, const BoundaryFunction& f);

}  // namespace strip_vortex
