#include "strip_vortex/checks.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <random>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/strip_kernel.hpp"

namespace strip_vortex {

namespace {

CheckItem make_item(std::string name, double value, CheckItem::Relation relation, double bound) {
    CheckItem item;
    item.name = std::move(name);
    item.value = value;
    item.relation = relation;
    item.bound = bound;
    switch (relation) {
        case CheckItem::Relation::AtMost: item.passed = value <= bound; break;
        case CheckItem::Relation::AtLeast: item.passed = value >= bound; break;
        case CheckItem::Relation::Below: item.passed = value < bound; break;
        case CheckItem::Relation::Above: item.passed = value > bound; break;
    }
    return item;
}

/// Run `body` and record any exception as the criterion error.
template <class Body>
CriterionResult guarded(int id, std::string title, Body&& body) {
    CriterionResult result;
    result.id = id;
    result.title = std::move(title);
    try {
        body(result);
    } catch (const Error& e) {
        result.error = std::string(to_string(e.kind())) + ": " + e.what();
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

/// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ObstacleCurve config_obstacle(const RunConfig& c, std::size_t panels) {
    return build_obstacle(c.obstacle.shape, panels);
}

/// Uniform fluid point of the window |x1 - c| < L away from the obstacle by at least `gap`.
Vec2 fluid_sample(std::mt19937_64& rng, const ObstacleCurve& obs, double half_width, double gap) {
    const double c = 0.5 * (obs.min_x1() + obs.max_x1());
    std::uniform_real_distribution<double> u1(c - half_width, c + half_width), u2(0.0, kPi);
    for (;;) {
        const Vec2 x{u1(rng), u2(rng)};
        if (!(x.x2 > 0.0) || obs.contains(x)) continue;
        if (gap > 0.0 && obs.distance(x).distance < gap) continue;
        return x;
    }
}

/// Background at the configured or critical circulation for speed b.
BackgroundField flow_at(const AssemblyPtr& assembly, double i_top, double b, std::optional<double> gamma,
                        double sigma) {
    const double g = gamma ? *gamma : critical_circulation(*assembly, b, i_top);
    return BackgroundField(assembly, make_flow_config(*assembly, b, g, sigma, i_top));
}

}  // namespace

CheckItem CheckItem::at_most(std::string name, double value, double bound) {
    return make_item(std::move(name), value, Relation::AtMost, bound);
}
CheckItem CheckItem::at_least(std::string name, double value, double bound) {
    return make_item(std::move(name), value, Relation::AtLeast, bound);
}
CheckItem CheckItem::below(std::string name, double value, double bound) {
    return make_item(std::move(name), value, Relation::Below, bound);
}
CheckItem CheckItem::above(std::string name, double value, double bound) {
    return make_item(std::move(name), value, Relation::Above, bound);
}
CheckItem CheckItem::holds(std::string name, bool condition) {
    return make_item(std::move(name), condition ? 1.0 : 0.0, Relation::AtLeast, 1.0);
}

const char* to_string(CheckItem::Relation relation) {
    switch (relation) {
        case CheckItem::Relation::AtMost: return "<=";
        case CheckItem::Relation::AtLeast: return ">=";
        case CheckItem::Relation::Below: return "<";
        case CheckItem::Relation::Above: return ">";
    }
    return "?";
}

bool CriterionResult::passed() const {
    if (!error.empty() || items.empty()) return false;
    return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.passed; });
}

bool ChecksReport::passed() const {
    return !criteria.empty() &&
           std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed(); });
}

CriterionResult check_kernel(const RunConfig& config) {
    return guarded(1, "kernel exactness", [&](CriterionResult& r) {
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> u1(-10.0, 10.0), u2(0.0, kPi);
        auto interior = [&] {
            double v = u2(rng);
            while (!(v > 0.0)) v = u2(rng);
            return v;
        };
        double asym = 0.0;
        for (std::size_t k = 0; k < config.checks.symmetry_pairs; ++k) {
            const Vec2 y{u1(rng), interior()}, x{u1(rng), interior()};
            if (y == x) continue;
            asym = std::max(asym, std::abs(gs(y, x) - gs(x, y)));
        }
        r.items.push_back(CheckItem::at_most("max |gs(y,x) - gs(x,y)|", asym, 1e-13));

        double trace = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Vec2 x{u1(rng), interior()};
            const double y1 = u1(rng);
            trace = std::max({trace, std::abs(gs({y1, 1e-11}, x)), std::abs(gs({y1, kPi - 1e-11}, x))});
        }
        r.items.push_back(CheckItem::at_most("max |gs| on the walls", trace, 1e-10));

        std::vector<double> sep, logs;
        for (int s = 6; s <= 14; ++s) {
            sep.push_back(s);
            logs.push_back(std::log(gs({0.0, kPi / 2.0}, {static_cast<double>(s), kPi / 2.0})));
        }
        r.items.push_back(CheckItem::at_most("|far-field slope + 1|", std::abs(fitted_slope(sep, logs) + 1.0), 0.01));

        double robin_ulps = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const Vec2 x{u1(rng), interior()};
            const double exact = -std::log(2.0 * std::sin(x.x2)) / (2.0 * kPi);
            robin_ulps = std::max(robin_ulps, std::abs(hs_robin(x) - exact) / (DBL_EPSILON * std::max(1.0, std::abs(exact))));
        }
        r.items.push_back(CheckItem::at_most("strip Robin error in units of machine epsilon", robin_ulps, 4.0));
    });
}

CriterionResult check_boundary_solver(const RunConfig& config) {
    return guarded(2, "boundary solver convergence", [&](CriterionResult& r) {
        std::vector<double> logp, logres;
        for (std::size_t p : {32u, 64u, 128u, 256u}) {
            const HarmonicSolution rho = solve_rho(make_solver(config_obstacle(config, p)));
            logp.push_back(std::log(static_cast<double>(p)));
            logres.push_back(std::log(boundary_residual(rho, [](Vec2) { return 1.0; })));
        }
        r.items.push_back(CheckItem::at_least("rho boundary residual order", -fitted_slope(logp, logres), 1.5));

        const AssemblyPtr assembly = assemble(config_obstacle(config, config.obstacle.panels));
        const HarmonicSolution& rho = assembly->rho();
        const ObstacleCurve& obs = assembly->obstacle();
        std::mt19937_64 rng(config.seed + 1);
        double lo = 1.0, hi = 0.0;
        for (std::size_t k = 0; k < config.checks.probes; ++k) {
            const double v = rho.value(fluid_sample(rng, obs, config.grid.half_width, 0.0));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        r.items.push_back(CheckItem::above("min rho at probes", lo, 0.0));
        r.items.push_back(CheckItem::below("max rho at probes", hi, 1.0));

        std::vector<double> xs, lr;
        for (int k = 0; k <= 6; ++k) {
            const double x1 = obs.centroid().x1 + 6.0 + k;
            xs.push_back(x1);
            lr.push_back(std::log(rho.value({x1, kPi / 2.0})));
        }
        r.items.push_back(CheckItem::at_most("|ln rho decay slope + 1|", std::abs(fitted_slope(xs, lr) + 1.0), 0.02));

        const Vec2 probe{obs.max_x1() + 1.5, 1.5};
        r.items.push_back(CheckItem::at_most("representation formula error",
                                             std::abs(representation_check(rho, probe) - rho.value(probe)), 1e-4));

        double identity = 0.0;
        for (const Vec2 x : {Vec2{obs.max_x1() + 1.0, 1.0}, Vec2{obs.min_x1() - 0.7, 2.6}, Vec2{obs.max_x1() + 3.5, 0.5}}) {
            const Eigen::VectorXd dn = assembly->g0_normal_derivative(x);
            double sum = 0.0;
            for (std::size_t i = 0; i < obs.size(); ++i) sum -= dn[static_cast<Eigen::Index>(i)] * obs[i].weight;
            identity = std::max(identity, std::abs(sum - rho.value(x)));
        }
        r.items.push_back(CheckItem::at_most("rho from the normal derivative of G0", identity, 1e-3));
    });
}

CriterionResult check_green_function(const RunConfig& config) {
    return guarded(3, "Green function decomposition", [&](CriterionResult& r) {
        const std::size_t p = config.obstacle.panels;
        const AssemblyPtr assembly = assemble(config_obstacle(config, p));
        const GreenAssembly& g = *assembly;
        const ObstacleCurve& obs = g.obstacle();
        const double fine = assemble(config_obstacle(config, 2 * p))->lambda0();
        r.items.push_back(CheckItem::above("lambda0", g.lambda0(), 0.0));
        r.items.push_back(
            CheckItem::at_most("relative change of lambda0 under panel doubling", std::abs(fine - g.lambda0()) / fine, 1e-4));

        std::mt19937_64 rng(config.seed + 2);
        double asym = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Vec2 y = fluid_sample(rng, obs, 3.0, 0.05), x = fluid_sample(rng, obs, 3.0, 0.05);
            if (y == x) continue;
            asym = std::max(asym, std::abs(g.g(y, x) - g.g(x, y)));
        }
        r.items.push_back(CheckItem::at_most("max |G(y,x) - G(x,y)|", asym, 1e-4));

        double trace = 0.0;
        for (int k = 0; k < 5; ++k) {
            const Vec2 x = fluid_sample(rng, obs, 3.0, 0.2);
            for (int q = 0; q < 16; ++q) {
                const double t = 2.0 * kPi * (q + 0.37) / 16.0;
                trace = std::max(trace, std::abs(g.g(obs.curve().position(t), x) - g.lambda0() * g.rho_value(x)));
            }
        }
        r.items.push_back(CheckItem::at_most("max |G - lambda0 rho(x)| on the obstacle", trace, 1e-4));

        const Vec2 far{obs.centroid().x1 + 10.0, 1.0};
        r.items.push_back(CheckItem::below("|H(x,x) - H_S(x,x)| at separation 10", std::abs(g.robin(far) - hs_robin(far)), 1e-3));

        double wall = 0.0;
        for (double d : {0.05, 0.02, 0.01}) {
            const Vec2 x{obs.max_x1() + 1.5, d};
            wall = std::max(wall, std::abs(g.robin(x) - std::log(1.0 / (2.0 * d)) / (2.0 * kPi)));
        }
        r.items.push_back(CheckItem::below("max |H(x,x) - (1/2pi) ln(1/2d)| near the wall", wall, 0.5));

        double identity = 0.0;
        for (int k = 0; k < 4; ++k) {
            const Vec2 x = fluid_sample(rng, obs, 3.0, 0.2);
            const double s = 1e-4;
            const double limit = 0.5 * (g.h_regular({x.x1 + s, x.x2}, x) + g.h_regular({x.x1 - s, x.x2}, x));
            identity = std::max(identity, std::abs(limit - g.robin(x)));
        }
        r.items.push_back(CheckItem::at_most("Robin function against the limit of H(y,x)", identity, 1e-4));
    });
}

CriterionResult check_background_flow(const RunConfig& config) {
    return guarded(4, "background flow", [&](CriterionResult& r) {
        const AssemblyPtr assembly = assemble(config_obstacle(config, config.obstacle.panels));
        const double i_top = compute_top_flux(*assembly);
        const double b = config.physics.b;
        const double gc = critical_circulation(*assembly, b, i_top);
        double oracle = 0.0, abs_flux = 0.0, max_slope = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, min_coeff = std::numeric_limits<double>::infinity();
        for (double factor : {1.0, 2.0, 4.0}) {
            const double gamma = factor * gc;
            const BackgroundField bg(assembly, make_flow_config(*assembly, b, gamma, config.regime.sigma, i_top));
            const double lambda = bg.config().lambda;
            oracle = std::max(oracle, std::abs(flux_constant_oracle(*assembly, b, gamma) - lambda) / std::max(std::abs(lambda), b));
            abs_flux = std::max(abs_flux, std::abs(bg.beta_abs_flux() - gamma / b) / (gamma / b));
            max_slope = std::max(max_slope, bg.beta_plus_x2_normal_derivative().maxCoeff());
            const FarCoefficients c = bg.beta_far_coefficients();
            min_coeff = std::min({min_coeff, c.plus, c.minus});
            for (double v : {c.plus, c.minus}) {
                lo = std::min(lo, v * b / gamma);
                hi = std::max(hi, v * b / gamma);
            }
        }
        r.items.push_back(CheckItem::at_most("relative gap between flux constant and Green identity", oracle, 1e-3));
        r.items.push_back(CheckItem::at_most("relative error of the absolute obstacle flux against Gamma/b", abs_flux, 1e-3));
        r.items.push_back(CheckItem::below("max d(beta + x2)/dn", max_slope, 0.0));
        r.items.push_back(CheckItem::above("min beta far-field coefficient", min_coeff, 0.0));
        r.items.push_back(CheckItem::at_most("spread C''/C' of beta b/Gamma over a 4x range", hi / lo, 1.5));
    });
}

CriterionResult check_landscape_regimes(const RunConfig& config) {
    return guarded(5, "Kirchhoff-Routh regimes", [&](CriterionResult& r) {
        const double h = config.grid.h.value();
        const double L = config.grid.half_width;
        {
            const AssemblyPtr assembly = assemble(config_obstacle(config, config.obstacle.panels));
            const double i_top = compute_top_flux(*assembly);
            const BackgroundField bg =
                flow_at(assembly, i_top, config.physics.b, config.physics.gamma, config.regime.sigma);
            const Landscape land = scan(bg, config.region_spec(RegionKind::Window), h);
            const auto best = land.best();
            r.items.push_back(CheckItem::holds("(i) window minimizer found", best.has_value()));
            if (best) {
                r.items.push_back(CheckItem::above("(i) minimizer distance to the walls over h", best->wall_distance / h, 5.0));
                r.items.push_back(
                    CheckItem::above("(i) minimizer distance to the window edge over h", (L - std::abs(best->location.x1)) / h, 5.0));
            }
            double inner = std::numeric_limits<double>::infinity();
            for (std::size_t iu = 0; iu < land.lattice.u.size(); ++iu) {
                if (std::abs(land.lattice.u[iu]) >= 0.5 * L) continue;
                for (std::size_t iv = 0; iv < land.lattice.v.size(); ++iv) {
                    const double v = land.values[land.lattice.index(iu, iv)];
                    if (!std::isnan(v)) inner = std::min(inner, v);
                }
            }
            const double frame = frame_minimum(bg, L, h);
            r.items.push_back(CheckItem::above("(i) frame minimum minus half-window minimum", frame - inner, 0.0));
        }

        const AssemblyPtr large = assemble(config_obstacle(config, config.checks.large_panels));
        const double i_top = compute_top_flux(*large);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        bool all_found = true;
        double sandwich = std::numeric_limits<double>::infinity();
        for (double b : config.checks.regime2_b) {
            const BackgroundField bg = flow_at(large, i_top, b, std::nullopt, config.regime.sigma);
            const RegionSpec spec = config.region_spec(RegionKind::Layer);
            const Landscape land = scan(bg, spec, h);
            const auto best = land.best();
            if (!best) {
                all_found = false;
                continue;
            }
            lo = std::min(lo, best->scaled_distance);
            hi = std::max(hi, best->scaled_distance);
            const double speed = b + bg.config().lambda;
            const std::size_t n_u = land.lattice.u.size();
            const double shell = std::min(shell_minimum(bg, spec.theta1 / speed, n_u), shell_minimum(bg, spec.theta2 / speed, n_u));
            sandwich = std::min(sandwich, shell - land.min_value());
        }
        r.items.push_back(CheckItem::holds("(ii) layer minimizer found for every b", all_found));
        r.items.push_back(CheckItem::at_most("(ii) max/min of d*(b + lambda) across b", all_found ? hi / lo : INFINITY, 4.0));
        r.items.push_back(CheckItem::above("(ii) layer shell minimum minus layer minimum", sandwich, 0.0));

        const double b = config.checks.layer_b;
        const double gamma = critical_circulation(*large, b, i_top) + b * 0.5 * config.regime.sigma * large->obstacle_flux();
        const BackgroundField bg = flow_at(large, i_top, b, gamma, config.regime.sigma);
        r.items.push_back(CheckItem::holds("(iii) circulation lies in the sigma window", bg.config().regime == Regime::WindowIII));
        const Landscape layer = scan(bg, config.region_spec(RegionKind::Layer), h);
        const Landscape exterior = scan(bg, config.region_spec(RegionKind::Exterior), h);
        const auto m1 = layer.best();
        const auto m2 = exterior.best();
        r.items.push_back(CheckItem::holds("(iii) layer minimizer found", m1.has_value()));
        r.items.push_back(CheckItem::holds("(iii) exterior minimizer found", m2.has_value()));
        r.items.push_back(CheckItem::below("(iii) layer outer distance over delta",
                                           config.regime.theta2 / (b + bg.config().lambda) / config.regime.delta, 1.0));
        if (m1 && m2) {
            r.items.push_back(CheckItem::above("(iii) separation of the two minimizers over h", norm(m1->location - m2->location) / h, 1.0));
        }
    });
}

CriterionResult check_window_patches(const RunConfig& config) {
    return guarded(6, "window patch sweep", [&](CriterionResult& r) {
        const AssemblyPtr assembly = assemble(config_obstacle(config, config.obstacle.panels));
        const double i_top = compute_top_flux(*assembly);
        const BackgroundField bg = flow_at(assembly, i_top, config.physics.b, config.physics.gamma, config.regime.sigma);
        const RegionSpec region = config.region_spec(RegionKind::Window);
        const MinimizerRecord m = region_minimizer(bg, region, config.grid.h.value());
        const double h = config.solver.patch_h.value();
        const SweepSummary sweep =
            asymptotic_sweep(bg, region, h, config.physics.eps, m.location, {m.location}, config.solve_options());
        double mass = 0.0, drop = 0.0;
        bool converged = true, consistent = true, floor = true, negative = true;
        for (const SweepRow& row : sweep.rows) {
            mass = std::max(mass, row.report.max_mass_error);
            drop = std::max(drop, row.report.max_energy_drop);
            negative = negative && row.negativity.passed;
            converged = converged && row.report.converged;
            consistent = consistent && row.report.self_consistent;
            floor = floor && row.report.mu_floor_respected;
        }
        r.items.push_back(CheckItem::holds("every solve converged", converged));
        r.items.push_back(CheckItem::holds("converged patches are self-consistent", consistent));
        r.items.push_back(CheckItem::holds("mu >= -b pi at every iterate", floor));
        r.items.push_back(CheckItem::at_most("max mass error", mass, 1e-10));
        r.items.push_back(CheckItem::at_most("max energy decrease between iterates", drop, 1e-12));
        r.items.push_back(CheckItem::at_most("max/min of diameter/eps", sweep.diameter_ratio_spread, 2.0));
        r.items.push_back(
            CheckItem::at_most("centroid distance to the minimizer at the smallest eps over h", sweep.rows.back().report.minimizer_distance / h, 2.0));
        r.items.push_back(CheckItem::at_most("max drift of mu - (1/2pi) ln(1/eps)", sweep.max_mu_drift, 0.1));
        r.items.push_back(CheckItem::at_most("variation of 2E - mu", sweep.two_energy_minus_mu_variation, 0.2));
        r.items.push_back(CheckItem::holds("psi is negative on the exterior probes", negative));
    });
}

CriterionResult check_layer_patch(const RunConfig& config) {
    return guarded(7, "layer patch", [&](CriterionResult& r) {
        const AssemblyPtr assembly = assemble(config_obstacle(config, config.checks.large_panels));
        const double i_top = compute_top_flux(*assembly);
        const double b = config.checks.layer_b;
        const BackgroundField bg = flow_at(assembly, i_top, b, std::nullopt, config.regime.sigma);
        const RegionSpec region = config.region_spec(RegionKind::Layer);
        const MinimizerRecord m = region_minimizer(bg, region, config.grid.h.value());
        const double speed = b + bg.config().lambda;
        bool contact = false;
        try {
            const PatchSolution sol = solve_patch(bg, region, config.checks.layer_patch_h.value(), 0.5 / speed, m.location,
                                                  {m.location}, config.solve_options());
            r.items.push_back(CheckItem::holds("solve converged", sol.report.converged));
            r.items.push_back(CheckItem::above("d*(b + lambda) above theta1", sol.report.scaled_distance, region.theta1));
            r.items.push_back(CheckItem::below("d*(b + lambda) below theta2", sol.report.scaled_distance, region.theta2));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::BoundaryContact) throw;
            contact = true;
        }
        r.items.push_back(CheckItem::holds("no boundary contact", !contact));
    });
}

CriterionResult check_brute_force(const RunConfig& config) {
    return guarded(8, "brute-force oracle", [&](CriterionResult& r) {
        double gap = 0.0;
        for (std::uint64_t k = 0; k < 3; ++k) {
            DenseKernelModel model = make_synthetic_model(12, 0.15, 0.02, config.seed + k);
            const double eps = std::sqrt(2.5) / 12.0;
            std::vector<double> green, eta;
            model.evaluate({}, green, eta);
            const auto start = static_cast<std::size_t>(std::min_element(eta.begin(), eta.end()) - eta.begin());
            const FixedPointResult fp =
                iterate_patch(model, eps, initial_disk(model, model.cell_center(model.candidates()[start]), eps), {});
            gap = std::max(gap, std::abs(fp.state.energy - brute_force_energy(model, eps)));
        }
        r.items.push_back(CheckItem::at_most("max |iteration energy - exhaustive optimum|", gap, 1e-9));
    });
}

ChecksReport run_checks(const RunConfig& config, const CriterionCallback& on_result) {
    validate(config);
    ChecksReport report;
    for (auto check : {check_kernel, check_boundary_solver, check_green_function, check_background_flow,
                       check_landscape_regimes, check_window_patches, check_layer_patch, check_brute_force}) {
        report.criteria.push_back(check(config));
        if (on_result) on_result(report.criteria.back());
    }
    return report;
}

}  // namespace strip_vortex
