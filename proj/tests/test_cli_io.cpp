#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "strip_vortex/commands.hpp"
#include "strip_vortex/config_io.hpp"
#include "strip_vortex/errors.hpp"
#include "strip_vortex/field_io.hpp"

using namespace strip_vortex;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "strip_vortex_tests";
    fs::create_directories(dir);
    return dir / name;
}

FieldFile sample_field() {
    FieldFile f{"rho", "dimensionless", "window cells L=1 h=pi/32", {}, {}};
    for (int k = 0; k < 5; ++k) {
        f.points.push_back({0.1 * k - 0.2, kPi / 3.0 + 1e-3 * k});
        f.values.push_back(std::exp(-0.37 * k) / 3.0);
    }
    f.values[2] = std::numeric_limits<double>::quiet_NaN();
    return f;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("minimal config takes the defaults", "[config]") {
    const RunConfig c = parse_config("physics:\n  b: 1\n  gamma: critical\n  eps: 0.05\n");
    CHECK(c.physics.b == 1.0);
    CHECK_FALSE(c.physics.gamma.has_value());
    REQUIRE(c.physics.eps.size() == 1);
    CHECK(c.physics.eps[0] == 0.05);
    CHECK(c.regime.sigma == 0.05);
    CHECK(c.regime.delta == 0.5);
    CHECK(c.regime.theta1 == 0.05);
    CHECK(c.regime.theta2 == 20.0);
    CHECK(std::holds_alternative<Disk>(c.obstacle.shape));
    CHECK(c.grid.h.divisor == 128);
}

TEST_CASE("critical keyword resolves to b pi I_top", "[config]") {
    const RunConfig c = parse_config("physics:\n  b: 2\n  gamma: critical\n");
    const AssemblyPtr a = assemble(build_obstacle(c.obstacle.shape, c.obstacle.panels));
    const double i_top = compute_top_flux(*a);
    CHECK(resolve_gamma(c, *a, i_top) == Catch::Approx(2.0 * kPi * i_top).epsilon(1e-14));
    CHECK(flux_constant(*a, 2.0, resolve_gamma(c, *a, i_top), i_top) == Catch::Approx(0.0).margin(1e-14));
    CHECK(parse_config("physics:\n  gamma: 3.5\n").physics.gamma == 3.5);
}

TEST_CASE("spacing accepts pi/N and exact decimals", "[config]") {
    CHECK(parse_spacing("pi/256", "grid.h").divisor == 256);
    CHECK(parse_spacing(" pi / 64 ", "grid.h").divisor == 64);
    CHECK(parse_spacing("0.02454369260617026", "grid.h").divisor == 128);
    CHECK(kind_of([] { parse_spacing("0.1", "grid.h"); }) == ErrorKind::Configuration);
    CHECK(kind_of([] { parse_spacing("pi/0", "grid.h"); }) == ErrorKind::Configuration);
    CHECK(kind_of([] { parse_spacing("tiny", "grid.h"); }) == ErrorKind::Parse);
}

TEST_CASE("negative h is a validation error naming the field", "[config]") {
    try {
        parse_config("grid:\n  h: -0.05\n");
        FAIL("expected a configuration error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Configuration);
        CHECK(std::string(e.what()).find("grid.h") != std::string::npos);
    }
}

TEST_CASE("invariant violations name the field", "[config]") {
    try {
        parse_config("physics:\n  eps: [0.1, 1.5]\n");
        FAIL("expected a configuration error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Configuration);
        CHECK(std::string(e.what()).find("physics.eps") != std::string::npos);
    }
    CHECK(kind_of([] { parse_config("physics:\n  b: 0\n"); }) == ErrorKind::Configuration);
    CHECK(kind_of([] { parse_config("obstacle:\n  panels: -4\n"); }) == ErrorKind::Configuration);
}

TEST_CASE("unknown keys are rejected", "[config]") {
    CHECK(kind_of([] { parse_config("physics:\n  speed: 1\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_config("plots:\n  dpi: 300\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_config("obstacle:\n  shape: disk\n  semi_axes: [1, 2]\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_config("physics: [1, 2\n"); }) == ErrorKind::Parse);
}

TEST_CASE("config round-trips through emit", "[config]") {
    RunConfig c;
    c.obstacle.shape = Ellipse{{0.25, 1.4}, 0.6, 0.3, 0.1};
    c.obstacle.panels = 96;
    c.grid.h = Spacing{256};
    c.physics.gamma = 1.0 / 3.0;
    c.physics.eps = {0.1, 0.07, 0.049};
    c.regime.region = RegionKind::Layer;
    c.solver.relaxation = 0.7;
    c.landscape_regions = {RegionKind::Layer, RegionKind::Exterior};
    c.output_dir = "runs/a b";
    c.seed = 12345678901234ULL;
    CHECK(parse_config(emit_config(c)) == c);

    RunConfig star;
    star.obstacle.shape = FourierStar{{0.0, kPi / 2.0}, 0.5, {0.05, 0.0}, {0.0, 0.03}};
    CHECK(parse_config(emit_config(star)) == star);
    CHECK(parse_config(emit_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("field files round-trip exactly", "[field]") {
    const FieldFile f = sample_field();
    const fs::path path = scratch("round_trip.csv");
    write_field(f, path);
    const FieldFile g = read_field(path);
    CHECK(g.quantity == f.quantity);
    CHECK(g.units == f.units);
    CHECK(g.grid == f.grid);
    CHECK(g.points == f.points);
    REQUIRE(g.values.size() == f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (std::isnan(f.values[k])) {
            CHECK(std::isnan(g.values[k]));
        } else {
            CHECK(g.values[k] == f.values[k]);
        }
    }
}

TEST_CASE("tampered field files fail the hash check", "[field]") {
    const fs::path path = scratch("tampered.csv");
    write_field(sample_field(), path);
    std::string text = slurp(path);
    const std::size_t row = text.find("x1,x2,value\n") + 12;
    text[row] = text[row] == '-' ? '0' : '-';
    std::ofstream(path, std::ios::trunc) << text;
    CHECK(kind_of([&] { read_field(path); }) == ErrorKind::Parse);
}

TEST_CASE("empty fields are never written", "[field]") {
    const fs::path path = scratch("empty.csv");
    fs::remove(path);
    FieldFile f{"kirchhoff_routh", "dimensionless", "none", {}, {}};
    CHECK(kind_of([&] { write_field(f, path); }) == ErrorKind::Precondition);
    CHECK_FALSE(fs::exists(path));
}

TEST_CASE("unwritable paths surface as I/O errors", "[field]") {
    const fs::path path = scratch("missing_dir") / "nested" / "f.csv";
    CHECK(kind_of([&] { write_field(sample_field(), path); }) == ErrorKind::Io);
    CHECK(kind_of([&] { read_field(scratch("does_not_exist.csv")); }) == ErrorKind::Io);
}

TEST_CASE("checks report JSON is canonical", "[report]") {
    ChecksReport report;
    CriterionResult r;
    r.id = 8;
    r.title = "oracle";
    r.items.push_back(CheckItem::at_most("gap", 1e-12, 1e-9));
    report.criteria.push_back(r);
    const std::string text = checks_report_json(report);
    CHECK(text == checks_report_json(report));
    CHECK(text.find("\"criteria\"") < text.find("\"passed\": true"));
    CHECK(text.back() == '\n');
}

TEST_CASE("output directory precedence", "[cli]") {
    RunConfig c;
    c.output_dir = "from_config";
    ::unsetenv(kOutputDirEnv);
    CHECK(resolve_output_dir("", c) == fs::path("from_config"));
    ::setenv(kOutputDirEnv, "from_env", 1);
    CHECK(resolve_output_dir("", c) == fs::path("from_env"));
    CHECK(resolve_output_dir("from_cli", c) == fs::path("from_cli"));
    ::unsetenv(kOutputDirEnv);
}

TEST_CASE("layer solve with an oversized patch is infeasible", "[cli][strip]") {
    CommandContext ctx;
    ctx.config = parse_config("physics:\n  b: 40\n  eps: 0.9\nregime:\n  region: layer\nsolver:\n  patch_h: pi/128\n");
    ctx.out_dir = scratch("infeasible");
    CHECK(kind_of([&] { run_solve(ctx); }) == ErrorKind::Infeasible);
}
