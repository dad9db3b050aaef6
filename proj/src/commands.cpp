#include "strip_vortex/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "json.hpp"

#include "strip_vortex/config_io.hpp"
#include "strip_vortex/errors.hpp"
#include "strip_vortex/field_io.hpp"

namespace strip_vortex {

namespace {

using nlohmann::json;

/// Shared setup of every physics subcommand.
struct Problem {
    AssemblyPtr assembly;
    double i_top = 0.0;
    double gamma_critical = 0.0;
    std::unique_ptr<BackgroundField> background;
};

void say(const CommandContext& ctx, const std::string& message) {
    if (ctx.log) ctx.log(message);
}

/// Six significant digits for log text.
std::string brief(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void prepare_output(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    file << text;
    if (!file.flush()) fail(ErrorKind::Io, "failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& record) { write_text(path, record.dump(2) + "\n"); }

Problem set_up(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    Problem p;
    say(ctx, "assembling obstacle with " + std::to_string(c.obstacle.panels) + " panels");
    p.assembly = assemble(build_obstacle(c.obstacle.shape, c.obstacle.panels));
    p.i_top = compute_top_flux(*p.assembly);
    p.gamma_critical = critical_circulation(*p.assembly, c.physics.b, p.i_top);
    const double gamma = resolve_gamma(c, *p.assembly, p.i_top);
    p.background = std::make_unique<BackgroundField>(
        p.assembly, make_flow_config(*p.assembly, c.physics.b, gamma, c.regime.sigma, p.i_top));
    say(ctx, "flux constant " + brief(p.background->config().lambda) + ", regime " +
                 to_string(p.background->config().regime));
    return p;
}

json vec(Vec2 v) { return json::array({v.x1, v.x2}); }

json flow_json(const Problem& p) {
    const FlowConfig& f = p.background->config();
    return {{"b", f.b},           {"gamma", f.gamma},   {"gamma_critical", p.gamma_critical},
            {"sigma", f.sigma},   {"lambda", f.lambda}, {"i_top", f.i_top},
            {"i_obs", f.i_obs},   {"regime", to_string(f.regime)}};
}

json minimizer_json(const MinimizerRecord& m) {
    return {{"region", to_string(m.region)},
            {"cell", json::array({m.iu, m.iv})},
            {"cell_point", vec(m.cell_point)},
            {"location", vec(m.location)},
            {"value", m.value},
            {"distance", m.distance},
            {"scaled_distance", m.scaled_distance},
            {"wall_distance", m.wall_distance},
            {"degenerate", m.degenerate}};
}

json solve_report_json(const SolveReport& r) {
    return {{"eps", r.eps},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"mu", r.mu},
            {"energy", r.energy},
            {"fill", r.fill},
            {"diameter", r.diameter},
            {"centroid", vec(r.centroid)},
            {"minimizer_distance", r.minimizer_distance},
            {"mu_scaled", r.mu_scaled},
            {"energy_scaled", r.energy_scaled},
            {"omega_psi", r.omega_psi},
            {"obstacle_distance", r.obstacle_distance},
            {"scaled_distance", r.scaled_distance},
            {"support_cells", r.support_cells},
            {"max_mass_error", r.max_mass_error},
            {"max_energy_drop", r.max_energy_drop},
            {"min_mu", r.min_mu},
            {"mu_floor_respected", r.mu_floor_respected},
            {"self_consistent", r.self_consistent}};
}

json negativity_json(const NegativityReport& n) {
    return {{"passed", n.passed}, {"max_psi", n.max_psi}, {"probes", n.probes}};
}

std::string grid_text(const RunConfig& c) {
    return "L=" + format_value(c.grid.half_width) + " h=" + format_spacing(c.grid.h);
}

/// Field of a landscape over its lattice, restricted to fluid points.
FieldFile landscape_field(const Landscape& land, const ObstacleCurve& obstacle, const RunConfig& c) {
    FieldFile field;
    field.quantity = "kirchhoff_routh";
    field.units = "dimensionless";
    field.grid = std::string(to_string(land.region)) + " lattice " + std::to_string(land.lattice.u.size()) + "x" +
                 std::to_string(land.lattice.v.size()) + " " + grid_text(c);
    for (std::size_t iu = 0; iu < land.lattice.u.size(); ++iu) {
        for (std::size_t iv = 0; iv < land.lattice.v.size(); ++iv) {
            const Vec2 x = land.lattice.point(iu, iv);
            if (!(x.x2 > 0.0 && x.x2 < kPi) || obstacle.contains(x)) continue;
            field.points.push_back(x);
            field.values.push_back(land.values[land.lattice.index(iu, iv)]);
        }
    }
    return field;
}

json checks_json(const ChecksReport& report) {
    json criteria = json::array();
    for (const CriterionResult& c : report.criteria) {
        json items = json::array();
        for (const CheckItem& i : c.items) {
            items.push_back({{"name", i.name},
                             {"value", i.value},
                             {"relation", to_string(i.relation)},
                             {"bound", i.bound},
                             {"passed", i.passed}});
        }
        criteria.push_back({{"id", c.id}, {"title", c.title}, {"passed", c.passed()}, {"error", c.error}, {"items", items}});
    }
    return {{"passed", report.passed()}, {"criteria", criteria}};
}

}  // namespace

int run_green(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    prepare_output(ctx.out_dir);
    const Problem p = set_up(ctx);
    const GreenAssembly& g = *p.assembly;
    const TruncatedGrid grid = build_grid(g.obstacle(), c.grid.half_width, c.grid.h.value());

    std::vector<Vec2> points;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!grid.masked(k)) points.push_back(grid.center(k));
    }
    say(ctx, "sampling rho and the Robin function at " + std::to_string(points.size()) + " cells");
    const std::vector<LandscapeSample> samples = sample_kr_many(*p.background, points);

    FieldFile rho{"rho", "dimensionless", "window cells " + grid_text(c), points, {}};
    FieldFile robin{"robin", "dimensionless", rho.grid, points, {}};
    for (std::size_t k = 0; k < points.size(); ++k) {
        rho.values.push_back(g.rho_value(points[k]));
        robin.values.push_back(samples[k].robin);
    }
    write_field(rho, ctx.out_dir / "rho.csv");
    write_field(robin, ctx.out_dir / "robin.csv");

    const FarCoefficients far = g.far_coefficients();
    json record = {{"lambda0", g.lambda0()},
                   {"obstacle_flux", g.obstacle_flux()},
                   {"panels", g.obstacle().size()},
                   {"collar_width", g.collar_width()},
                   {"rho_far", {{"plus", far.plus}, {"minus", far.minus}}},
                   {"flow", flow_json(p)},
                   {"grid", {{"half_width", c.grid.half_width}, {"h", format_spacing(c.grid.h)}, {"cells", points.size()}}},
                   {"files", json::array({"rho.csv", "robin.csv"})}};
    if (p.background->config().lambda >= 0.0) {
        const FarCoefficients beta = p.background->beta_far_coefficients();
        record["beta_far"] = {{"plus", beta.plus}, {"minus", beta.minus}};
    }
    write_json(ctx.out_dir / "green.json", record);
    return 0;
}

int run_landscape(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    prepare_output(ctx.out_dir);
    const Problem p = set_up(ctx);
    json regions = json::array();
    json files = json::array();
    for (RegionKind kind : c.landscape_regions) {
        const std::string name = to_string(kind);
        say(ctx, "scanning the " + name + " region");
        const Landscape land = scan(*p.background, c.region_spec(kind), c.grid.h.value());
        const std::string file = "landscape_" + name + ".csv";
        write_field(landscape_field(land, p.assembly->obstacle(), c), ctx.out_dir / file);
        files.push_back(file);
        json minimizers = json::array();
        for (const MinimizerRecord& m : land.minimizers) minimizers.push_back(minimizer_json(m));
        regions.push_back({{"region", name},
                           {"evaluated", land.evaluated_count()},
                           {"min_value", land.min_value()},
                           {"max_value", land.max_value()},
                           {"collar", land.collar},
                           {"minimizers", minimizers}});
        say(ctx, name + ": " + std::to_string(land.minimizers.size()) + " minimizer(s)");
    }
    write_json(ctx.out_dir / "landscape.json", {{"flow", flow_json(p)}, {"regions", regions}, {"files", files}});
    return 0;
}

int run_solve(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    prepare_output(ctx.out_dir);
    const Problem p = set_up(ctx);
    const RegionSpec region = c.region_spec(c.regime.region);
    const MinimizerRecord m = region_minimizer(*p.background, region, c.grid.h.value());
    const double eps = c.physics.eps.front();
    say(ctx, "solving at eps " + brief(eps) + " from (" + brief(m.location.x1) + ", " + brief(m.location.x2) + ")");
    const PatchSolution sol =
        solve_patch(*p.background, region, c.solver.patch_h.value(), eps, m.location, {m.location}, c.solve_options());

    FieldFile patch{"omega", "1/length^2", "patch cells h=" + format_spacing(c.solver.patch_h), {}, {}};
    for (const CellMass& cm : sol.state.support) {
        patch.points.push_back(sol.model->cell_center(cm.cell));
        patch.values.push_back(cm.omega);
    }
    write_field(patch, ctx.out_dir / "patch.csv");

    std::string trace = "iteration,mu,energy,support_size,mass\n";
    for (const IterationRecord& r : sol.trace) {
        trace += std::to_string(r.iteration) + "," + format_value(r.mu) + "," + format_value(r.energy) + "," +
                 std::to_string(r.support_size) + "," + format_value(r.mass) + "\n";
    }
    write_text(ctx.out_dir / "trace.csv", trace);

    json record = {{"flow", flow_json(p)},
                   {"region", to_string(region.kind)},
                   {"patch_h", format_spacing(c.solver.patch_h)},
                   {"minimizer", minimizer_json(m)},
                   {"report", solve_report_json(sol.report)},
                   {"files", json::array({"patch.csv", "trace.csv"})}};
    if (region.kind == RegionKind::Window) record["negativity"] = negativity_json(verify_exterior_negativity(sol));
    write_json(ctx.out_dir / "solve.json", record);
    return sol.report.converged ? 0 : 1;
}

int run_sweep(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    prepare_output(ctx.out_dir);
    const Problem p = set_up(ctx);
    const RegionSpec region = c.region_spec(c.regime.region);
    const MinimizerRecord m = region_minimizer(*p.background, region, c.grid.h.value());
    say(ctx, "sweeping " + std::to_string(c.physics.eps.size()) + " values of eps");
    const SweepSummary sweep = asymptotic_sweep(*p.background, region, c.solver.patch_h.value(), c.physics.eps,
                                                m.location, {m.location}, c.solve_options());
    json rows = json::array();
    bool ok = true;
    for (const SweepRow& row : sweep.rows) {
        ok = ok && row.report.converged;
        rows.push_back({{"eps", row.eps},
                        {"report", solve_report_json(row.report)},
                        {"negativity", negativity_json(row.negativity)},
                        {"two_energy_minus_mu", row.two_energy_minus_mu},
                        {"diameter_ratio", row.diameter_ratio}});
    }
    write_json(ctx.out_dir / "sweep.json",
               {{"flow", flow_json(p)},
                {"region", to_string(region.kind)},
                {"patch_h", format_spacing(c.solver.patch_h)},
                {"minimizer", minimizer_json(m)},
                {"rows", rows},
                {"max_mu_drift", sweep.max_mu_drift},
                {"two_energy_minus_mu_variation", sweep.two_energy_minus_mu_variation},
                {"diameter_ratio_spread", sweep.diameter_ratio_spread},
                {"max_abs_omega_psi", sweep.max_abs_omega_psi}});
    return ok ? 0 : 1;
}

std::string checks_report_json(const ChecksReport& report) { return checks_json(report).dump(2) + "\n"; }

int run_checks_command(const CommandContext& ctx, const CriterionCallback& on_result) {
    prepare_output(ctx.out_dir);
    const ChecksReport report = run_checks(ctx.config, [&](const CriterionResult& r) {
        say(ctx, "criterion " + std::to_string(r.id) + " " + r.title + ": " + (r.passed() ? "pass" : "fail"));
        if (on_result) on_result(r);
    });
    write_text(ctx.out_dir / "checks.json", checks_report_json(report));
    return report.passed() ? 0 : 1;
}

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"green", "landscape", "solve", "sweep", "checks"};
    return names;
}

int run_subcommand(const std::string& name, const CommandContext& ctx) {
    if (name == "green") return run_green(ctx);
    if (name == "landscape") return run_landscape(ctx);
    if (name == "solve") return run_solve(ctx);
    if (name == "sweep") return run_sweep(ctx);
    if (name == "checks") return run_checks_command(ctx);
    fail(ErrorKind::Configuration, "unknown subcommand '" + name + "'");
}

std::filesystem::path resolve_output_dir(const std::string& cli_value, const RunConfig& config) {
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    return config.output_dir;
}

}  // namespace strip_vortex
