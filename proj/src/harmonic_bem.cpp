#include "strip_vortex/harmonic_bem.hpp"

#include <sstream>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/quadrature.hpp"
#include "strip_vortex/strip_kernel.hpp"

namespace strip_vortex {

namespace {

constexpr int kMaxDepth = 14;
constexpr double kMidpointRatio = 400.0;
constexpr double kGauss2Ratio = 40.0;
constexpr double kGauss4Ratio = 8.0;
constexpr double kGauss8Ratio = 2.5;
constexpr double kMaxCondition = 1e12;

/// Local frame of a straight chord from a to b as seen from x.
struct Chord {
    double length;
    Vec2 e;      // unit tangent
    Vec2 nu;     // unit normal into the obstacle
    double u1;   // start coordinate relative to the foot of x
    double u2;   // end coordinate
    double zeta; // signed offset of x along nu

    Chord(Vec2 a, Vec2 b, Vec2 x) {
        const Vec2 ab = b - a;
        length = norm(ab);
        e = (1.0 / length) * ab;
        nu = {-e.x2, e.x1};
        const Vec2 ax = x - a;
        const double ux = dot(ax, e);
        zeta = dot(ax, nu);
        u1 = -ux;
        u2 = length - ux;
    }

    /// Angle subtended by the chord at x, zero when x lies on the chord line.
    double angle() const {
        if (zeta == 0.0) return 0.0;
        return std::atan2(zeta * (u2 - u1), zeta * zeta + u1 * u2);
    }

    /// Integral of ln|y - x| over the chord.
    double log_integral() const {
        auto f = [this](double u) {
            const double r2 = u * u + zeta * zeta;
            if (r2 == 0.0) return 0.0;
            double v = 0.5 * u * std::log(r2) - u;
            if (zeta != 0.0) v += zeta * std::atan(u / zeta);
            return v;
        };
        return f(u2) - f(u1);
    }

    /// Integral over the chord of the x-gradient of ln|x - y|.
    Vec2 log_gradient_integral() const {
        const double r1 = u1 * u1 + zeta * zeta;
        const double r2 = u2 * u2 + zeta * zeta;
        const double tangential = (r1 > 0.0 && r2 > 0.0) ? -0.5 * std::log(r2 / r1) : 0.0;
        return tangential * e + angle() * nu;
    }
};

/// Unchecked regular part -(1/2pi) ln|y - x| - gs(y, x).
double regular_part(Vec2 y, Vec2 x) {
    const double r = norm(y - x);
    if (r < 1e-12) return -kInvTwoPi * std::log(2.0 * std::sin(x.x2));
    return -kInvTwoPi * std::log(r) - gs_fast(y, x);
}

/// x-gradient of the free-space part -(1/2pi) ln|x - y|.
Vec2 free_gradient(Vec2 y, Vec2 x) {
    const Vec2 v = x - y;
    const double r2 = dot(v, v);
    return (-kInvTwoPi / r2) * v;
}

template <class T, class Kernel>
T gauss_on_interval(const ParametricCurve& curve, double ta, double tb, const Kernel& kernel, std::size_t n) {
    const GaussRule& rule = gauss_legendre(n);
    const double half = 0.5 * (tb - ta);
    const double mid = 0.5 * (ta + tb);
    T sum{};
    for (std::size_t k = 0; k < n; ++k) {
        const double t = mid + half * rule.nodes[k];
        const Vec2 tangent = curve.derivative(t);
        const double speed = norm(tangent);
        const Vec2 normal{-tangent.x2 / speed, tangent.x1 / speed};
        sum = sum + (half * rule.weights[k] * speed) * kernel(curve.position(t), normal);
    }
    return sum;
}

template <class T, class Kernel, class Flat>
T integrate_adaptive(const ParametricCurve& curve, double ta, double tb, Vec2 x, int depth,
                     const Kernel& kernel, const Flat& flat) {
    const double tm = 0.5 * (ta + tb);
    const Vec2 ym = curve.position(tm);
    const double len = curve.speed(tm) * (tb - ta);
    if (norm(x - ym) >= kGauss8Ratio * len) {
        return gauss_on_interval<T>(curve, ta, tb, kernel, 8);
    }
    if (depth >= kMaxDepth) {
        return flat(curve.position(ta), curve.position(tb));
    }
    return integrate_adaptive<T>(curve, ta, tm, x, depth + 1, kernel, flat) +
           integrate_adaptive<T>(curve, tm, tb, x, depth + 1, kernel, flat);
}

template <class T, std::size_t N, class Kernel>
T sum_nodes(const std::array<QuadNode, N>& nodes, const Kernel& kernel) {
    T sum{};
    for (const QuadNode& q : nodes) sum = sum + q.weight * kernel(q.point, q.normal);
    return sum;
}

/// Distance-tiered panel quadrature with adaptive bisection close to the panel.
template <class T, class Kernel, class Flat>
T integrate_panel(const ParametricCurve& curve, const Panel& panel, Vec2 x, const Kernel& kernel,
                  const Flat& flat) {
    const double ratio = norm(x - panel.mid) / panel.weight;
    if (ratio >= kMidpointRatio) return panel.weight * kernel(panel.mid, panel.normal);
    if (ratio >= kGauss2Ratio) return sum_nodes<T>(panel.gauss2, kernel);
    if (ratio >= kGauss4Ratio) return sum_nodes<T>(panel.gauss4, kernel);
    if (ratio >= kGauss8Ratio) return sum_nodes<T>(panel.gauss8, kernel);
    return integrate_adaptive<T>(curve, panel.t0, panel.t1, x, 0, kernel, flat);
}

}  // namespace

double panel_potential(const ParametricCurve& curve, const Panel& panel, Vec2 x) {
    auto kernel = [x](Vec2 y, Vec2) { return gs_fast(y, x); };
    auto flat = [x](Vec2 a, Vec2 b) {
        const Chord c(a, b, x);
        const Vec2 m = 0.5 * (a + b);
        return -kInvTwoPi * c.log_integral() - regular_part(m, x) * c.length;
    };
    return integrate_panel<double>(curve, panel, x, kernel, flat);
}

Vec2 panel_gradient(const ParametricCurve& curve, const Panel& panel, Vec2 x) {
    auto kernel = [x](Vec2 y, Vec2) { return grad_gs_fast(x, y); };
    auto flat = [x](Vec2 a, Vec2 b) {
        const Chord c(a, b, x);
        const Vec2 m = 0.5 * (a + b);
        const Vec2 smooth = grad_gs_fast(x, m) - free_gradient(m, x);
        return -kInvTwoPi * c.log_gradient_integral() + c.length * smooth;
    };
    return integrate_panel<Vec2>(curve, panel, x, kernel, flat);
}

double panel_double_layer(const ParametricCurve& curve, const Panel& panel, Vec2 x) {
    auto kernel = [x](Vec2 y, Vec2 n) { return dot(grad_gs_fast(y, x), n); };
    auto flat = [x](Vec2 a, Vec2 b) {
        const Chord c(a, b, x);
        const Vec2 m = 0.5 * (a + b);
        // y-gradient of the free part is minus its x-gradient.
        const Vec2 smooth = grad_gs_fast(m, x) + free_gradient(m, x);
        return kInvTwoPi * c.angle() + c.length * dot(smooth, c.nu);
    };
    return integrate_panel<double>(curve, panel, x, kernel, flat);
}

double self_potential(const ParametricCurve& curve, const Panel& panel) {
    const double tm = 0.5 * (panel.t0 + panel.t1);
    const double a = 0.5 * (panel.t1 - panel.t0);
    const Vec2 x = curve.position(tm);
    const double jm = curve.speed(tm);
    // gs J + (1/2pi) J_m ln|t - tm| is continuous; the subtracted log is integrated exactly.
    auto smooth = [&](double t) {
        return gs_fast(curve.position(t), x) * curve.speed(t) + kInvTwoPi * jm * std::log(std::abs(t - tm));
    };
    const double body = integrate_gauss(smooth, panel.t0, tm, 16) + integrate_gauss(smooth, tm, panel.t1, 16);
    return body - kInvTwoPi * jm * 2.0 * (a * std::log(a) - a);
}

double self_normal_derivative(const ParametricCurve& curve, const Panel& panel) {
    const double tm = 0.5 * (panel.t0 + panel.t1);
    const Vec2 x = curve.position(tm);
    const Vec2 n = panel.normal;
    auto integrand = [&](double t) { return dot(grad_gs_fast(x, curve.position(t)), n) * curve.speed(t); };
    return integrate_gauss(integrand, panel.t0, tm, 16) + integrate_gauss(integrand, tm, panel.t1, 16);
}

BoundarySolver::BoundarySolver(ObstacleCurve obstacle) : obstacle_(std::move(obstacle)) {
    const auto p = static_cast<Eigen::Index>(obstacle_.size());
    const ParametricCurve& curve = obstacle_.curve();
    a_.resize(p, p);
    d_.resize(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        const Panel& pi = obstacle_[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < p; ++j) {
            const Panel& pj = obstacle_[static_cast<std::size_t>(j)];
            if (i == j) {
                a_(i, j) = self_potential(curve, pj);
                d_(i, j) = self_normal_derivative(curve, pj);
            } else {
                a_(i, j) = panel_potential(curve, pj, pi.mid);
                d_(i, j) = dot(panel_gradient(curve, pj, pi.mid), pi.normal);
            }
        }
    }
    lu_a_.compute(a_);
    rcond_a_ = lu_a_.rcond();

    Eigen::MatrixXd m(p + 1, p + 1);
    m.topLeftCorner(p, p) = a_;
    m.col(p).head(p).setConstant(-1.0);
    m.row(p).head(p) = weights().transpose();
    m(p, p) = 0.0;
    lu_m_.compute(m);
    rcond_m_ = lu_m_.rcond();

    if (!(rcond_a_ * kMaxCondition > 1.0) || !(rcond_m_ * kMaxCondition > 1.0)) {
        std::ostringstream msg;
        msg << "collocation matrix condition estimate exceeds 1e12 (rcond " << rcond_a_ << ", constrained "
            << rcond_m_ << ")";
        fail(ErrorKind::IllConditioned, msg.str());
    }
}

Eigen::VectorXd BoundarySolver::weights() const {
    Eigen::VectorXd w(static_cast<Eigen::Index>(size()));
    for (std::size_t j = 0; j < size(); ++j) w[static_cast<Eigen::Index>(j)] = obstacle_[j].weight;
    return w;
}

Eigen::VectorXd BoundarySolver::solve_dirichlet(const Eigen::VectorXd& f) const {
    return lu_a_.solve(f);
}

Eigen::MatrixXd BoundarySolver::solve_dirichlet(const Eigen::MatrixXd& f) const {
    return lu_a_.solve(f);
}

Eigen::VectorXd BoundarySolver::solve_dirichlet_transpose(const Eigen::VectorXd& r) const {
    return lu_a_.transpose().solve(r);
}

std::pair<Eigen::VectorXd, double> BoundarySolver::solve_constrained(const Eigen::VectorXd& f,
                                                                     double charge) const {
    const auto p = static_cast<Eigen::Index>(size());
    Eigen::VectorXd rhs(p + 1);
    rhs.head(p) = f;
    rhs[p] = charge;
    const Eigen::VectorXd sol = lu_m_.solve(rhs);
    return {sol.head(p), sol[p]};
}

Eigen::VectorXd BoundarySolver::panel_integrals(Vec2 x) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
    const ParametricCurve& curve = obstacle_.curve();
    for (std::size_t j = 0; j < size(); ++j) {
        out[static_cast<Eigen::Index>(j)] = panel_potential(curve, obstacle_[j], x);
    }
    return out;
}

Eigen::VectorXd BoundarySolver::point_values(Vec2 x) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
    for (std::size_t j = 0; j < size(); ++j) out[static_cast<Eigen::Index>(j)] = gs_fast(obstacle_[j].mid, x);
    return out;
}

double BoundarySolver::evaluate(const Eigen::VectorXd& sigma, Vec2 x) const {
    const ParametricCurve& curve = obstacle_.curve();
    double sum = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
        sum += sigma[static_cast<Eigen::Index>(j)] * panel_potential(curve, obstacle_[j], x);
    }
    return sum;
}

Vec2 BoundarySolver::evaluate_gradient(const Eigen::VectorXd& sigma, Vec2 x) const {
    const ParametricCurve& curve = obstacle_.curve();
    Vec2 sum;
    for (std::size_t j = 0; j < size(); ++j) {
        sum = sum + sigma[static_cast<Eigen::Index>(j)] * panel_gradient(curve, obstacle_[j], x);
    }
    return sum;
}

Eigen::VectorXd BoundarySolver::normal_derivative(const Eigen::VectorXd& sigma) const {
    return 0.5 * sigma + d_ * sigma;
}

SolverPtr make_solver(ObstacleCurve obstacle) {
    return std::make_shared<const BoundarySolver>(std::move(obstacle));
}

HarmonicSolution::HarmonicSolution(SolverPtr solver, Eigen::VectorXd sigma, double lambda,
                                   Eigen::VectorXd boundary_data)
    : solver_(std::move(solver)), sigma_(std::move(sigma)), lambda_(lambda) {
    trace_ = boundary_data.array() + lambda_;
    dn_ = solver_->normal_derivative(sigma_);
}

double HarmonicSolution::charge() const { return solver_->weights().dot(sigma_); }

double HarmonicSolution::flux() const { return solver_->weights().dot(dn_); }

Eigen::VectorXd sample_boundary(const ObstacleCurve& obstacle, const BoundaryFunction& f) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(obstacle.size()));
    for (std::size_t j = 0; j < obstacle.size(); ++j) out[static_cast<Eigen::Index>(j)] = f(obstacle[j].mid);
    return out;
}

HarmonicSolution solve_constrained(const SolverPtr& solver, const Eigen::VectorXd& f, double flux) {
    auto [sigma, lambda] = solver->solve_constrained(f, flux);
    return HarmonicSolution(solver, std::move(sigma), lambda, f);
}

HarmonicSolution solve_constrained(const ObstacleCurve& obstacle, const BoundaryFunction& f, double flux) {
    const SolverPtr solver = make_solver(obstacle);
    return solve_constrained(solver, sample_boundary(obstacle, f), flux);
}

HarmonicSolution solve_dirichlet(const SolverPtr& solver, const Eigen::VectorXd& f) {
    return HarmonicSolution(solver, solver->solve_dirichlet(f), 0.0, f);
}

HarmonicSolution solve_rho(const SolverPtr& solver) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(solver->size()));
    return solve_dirichlet(solver, ones);
}

HarmonicSolution solve_xi(const SolverPtr& solver) {
    return solve_dirichlet(solver, sample_boundary(solver->obstacle(), [](Vec2 y) { return y.x2; }));
}

double representation_check(const HarmonicSolution& sol, Vec2 x) {
    const ObstacleCurve& obstacle = sol.solver().obstacle();
    if (obstacle.distance(x).distance < 2.0 * obstacle.max_panel_length() || obstacle.contains(x)) {
        fail(ErrorKind::NearSingularQuadrature, "representation point within two panel lengths of the obstacle");
    }
    const ParametricCurve& curve = obstacle.curve();
    double sum = 0.0;
    for (std::size_t j = 0; j < obstacle.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        sum += sol.normal_derivatives()[jj] * panel_potential(curve, obstacle[j], x) -
               sol.trace()[jj] * panel_double_layer(curve, obstacle[j], x);
    }
    return sum;
}

double boundary_residual(const HarmonicSolution& sol, const BoundaryFunction& f) {
    const ObstacleCurve& obstacle = sol.solver().obstacle();
    double worst = 0.0;
    for (std::size_t j = 0; j < obstacle.size(); ++j) {
        const Vec2 node = obstacle.curve().position(obstacle[j].t0);
        worst = std::max(worst, std::abs(sol.value(node) - f(node) - sol.lambda()));
    }
    return worst;
}

}  // namespace strip_vortex
