#include "strip_vortex/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "strip_vortex/errors.hpp"

namespace strip_vortex {

namespace {

/// Shortest decimal text that reads back to the same double.
std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

[[noreturn]] void parse_error(const std::string& field, const std::string& what) {
    fail(ErrorKind::Parse, field + ": " + what);
}

void require_keys(const YAML::Node& table, const std::string& name, const std::set<std::string>& allowed) {
    if (!table.IsMap()) parse_error(name, "expected a table");
    for (const auto& kv : table) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) parse_error(name + "." + key, "unknown key");
    }
}

double number(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) parse_error(field, "expected a number");
    const std::string s = n.Scalar();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) parse_error(field, "expected a number, got '" + s + "'");
    return v;
}

std::uint64_t integer(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) parse_error(field, "expected an integer");
    const std::string s = n.Scalar();
    if (!s.empty() && s[0] == '-') fail(ErrorKind::Configuration, field + " must not be negative");
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) parse_error(field, "expected an integer, got '" + s + "'");
    return v;
}

std::vector<double> numbers(const YAML::Node& n, const std::string& field) {
    std::vector<double> out;
    if (n.IsScalar()) {
        out.push_back(number(n, field));
    } else if (n.IsSequence()) {
        for (const auto& item : n) out.push_back(number(item, field));
    } else {
        parse_error(field, "expected a number or a list of numbers");
    }
    return out;
}

Vec2 point(const YAML::Node& n, const std::string& field) {
    const std::vector<double> v = numbers(n, field);
    if (v.size() != 2) parse_error(field, "expected [x1, x2]");
    return {v[0], v[1]};
}

void read_if(const YAML::Node& table, const char* key, const std::string& prefix, double& out) {
    if (table[key]) out = number(table[key], prefix + "." + key);
}

void read_if(const YAML::Node& table, const char* key, const std::string& prefix, std::size_t& out) {
    if (table[key]) out = static_cast<std::size_t>(integer(table[key], prefix + "." + key));
}

void read_if(const YAML::Node& table, const char* key, const std::string& prefix, Spacing& out) {
    if (table[key]) {
        if (!table[key].IsScalar()) parse_error(prefix + "." + key, "expected pi/N or a number");
        out = parse_spacing(table[key].Scalar(), prefix + "." + key);
    }
}

ShapeDescriptor parse_shape(const YAML::Node& t) {
    const std::string kind = t["shape"] ? t["shape"].as<std::string>() : "disk";
    const Vec2 center = t["center"] ? point(t["center"], "obstacle.center") : Vec2{0.0, kPi / 2.0};
    if (kind == "disk") {
        require_keys(t, "obstacle", {"shape", "center", "radius", "panels"});
        Disk d{center, 0.5};
        read_if(t, "radius", "obstacle", d.radius);
        return d;
    }
    if (kind == "ellipse") {
        require_keys(t, "obstacle", {"shape", "center", "semi_axes", "tilt", "panels"});
        if (!t["semi_axes"]) parse_error("obstacle.semi_axes", "required for an ellipse");
        const Vec2 axes = point(t["semi_axes"], "obstacle.semi_axes");
        Ellipse e{center, axes.x1, axes.x2, 0.0};
        read_if(t, "tilt", "obstacle", e.tilt);
        return e;
    }
    if (kind == "star") {
        require_keys(t, "obstacle", {"shape", "center", "r0", "cos", "sin", "panels"});
        if (!t["r0"]) parse_error("obstacle.r0", "required for a star");
        FourierStar s{center, number(t["r0"], "obstacle.r0"), {}, {}};
        if (t["cos"]) s.cos_coeffs = numbers(t["cos"], "obstacle.cos");
        if (t["sin"]) s.sin_coeffs = numbers(t["sin"], "obstacle.sin");
        return s;
    }
    parse_error("obstacle.shape", "expected disk, ellipse or star, got '" + kind + "'");
}

YAML::Node list(const std::vector<double>& v) {
    YAML::Node n(YAML::NodeType::Sequence);
    for (double x : v) n.push_back(shortest(x));
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
}

YAML::Node pair(Vec2 v) { return list({v.x1, v.x2}); }

}  // namespace

Spacing parse_spacing(const std::string& text, const std::string& field) {
    static const std::regex fraction(R"(\s*pi\s*/\s*(\d+)\s*)");
    std::smatch m;
    if (std::regex_match(text, m, fraction)) {
        const std::size_t n = std::stoull(m[1].str());
        if (n == 0) fail(ErrorKind::Configuration, field + " must be positive");
        return Spacing{n};
    }
    double h = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), h);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) parse_error(field, "expected pi/N or a number");
    if (!(h > 0.0)) fail(ErrorKind::Configuration, field + " must be positive");
    const double ratio = kPi / h;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * n) fail(ErrorKind::Configuration, field + " must divide pi");
    return Spacing{static_cast<std::size_t>(n)};
}

std::string format_spacing(const Spacing& spacing) { return "pi/" + std::to_string(spacing.divisor); }

RegionKind parse_region(const std::string& text, const std::string& field) {
    for (RegionKind k : {RegionKind::Window, RegionKind::Layer, RegionKind::Exterior}) {
        if (text == to_string(k)) return k;
    }
    parse_error(field, "expected window, layer or exterior, got '" + text + "'");
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        fail(ErrorKind::Parse, std::string("malformed configuration: ") + e.what());
    }
    RunConfig c;
    if (root.IsNull()) {
        validate(c);
        return c;
    }
    try {
        require_keys(root, "config", {"obstacle", "grid", "physics", "regime", "solver", "checks", "landscape", "output", "seed"});

        if (const YAML::Node t = root["obstacle"]) {
            if (!t.IsMap()) parse_error("obstacle", "expected a table");
            c.obstacle.shape = parse_shape(t);
            read_if(t, "panels", "obstacle", c.obstacle.panels);
        }
        if (const YAML::Node t = root["grid"]) {
            require_keys(t, "grid", {"half_width", "h"});
            read_if(t, "half_width", "grid", c.grid.half_width);
            read_if(t, "h", "grid", c.grid.h);
        }
        if (const YAML::Node t = root["physics"]) {
            require_keys(t, "physics", {"b", "gamma", "eps"});
            read_if(t, "b", "physics", c.physics.b);
            if (const YAML::Node g = t["gamma"]) {
                if (g.IsScalar() && g.Scalar() == "critical") {
                    c.physics.gamma.reset();
                } else {
                    c.physics.gamma = number(g, "physics.gamma");
                }
            }
            if (t["eps"]) c.physics.eps = numbers(t["eps"], "physics.eps");
        }
        if (const YAML::Node t = root["regime"]) {
            require_keys(t, "regime", {"sigma", "delta", "theta1", "theta2", "region"});
            read_if(t, "sigma", "regime", c.regime.sigma);
            read_if(t, "delta", "regime", c.regime.delta);
            read_if(t, "theta1", "regime", c.regime.theta1);
            read_if(t, "theta2", "regime", c.regime.theta2);
            if (t["region"]) c.regime.region = parse_region(t["region"].as<std::string>(), "regime.region");
        }
        if (const YAML::Node t = root["solver"]) {
            require_keys(t, "solver", {"max_iterations", "relaxation", "mu_tolerance", "energy_tolerance", "patch_h"});
            read_if(t, "max_iterations", "solver", c.solver.max_iterations);
            read_if(t, "relaxation", "solver", c.solver.relaxation);
            read_if(t, "mu_tolerance", "solver", c.solver.mu_tolerance);
            read_if(t, "energy_tolerance", "solver", c.solver.energy_tolerance);
            read_if(t, "patch_h", "solver", c.solver.patch_h);
        }
        if (const YAML::Node t = root["checks"]) {
            require_keys(t, "checks", {"regime2_b", "layer_b", "large_panels", "layer_patch_h", "symmetry_pairs", "probes"});
            if (t["regime2_b"]) c.checks.regime2_b = numbers(t["regime2_b"], "checks.regime2_b");
            read_if(t, "layer_b", "checks", c.checks.layer_b);
            read_if(t, "large_panels", "checks", c.checks.large_panels);
            read_if(t, "layer_patch_h", "checks", c.checks.layer_patch_h);
            read_if(t, "symmetry_pairs", "checks", c.checks.symmetry_pairs);
            read_if(t, "probes", "checks", c.checks.probes);
        }
        if (const YAML::Node t = root["landscape"]) {
            require_keys(t, "landscape", {"regions"});
            if (const YAML::Node r = t["regions"]) {
                c.landscape_regions.clear();
                if (r.IsScalar()) {
                    c.landscape_regions.push_back(parse_region(r.Scalar(), "landscape.regions"));
                } else if (r.IsSequence()) {
                    for (const auto& item : r) c.landscape_regions.push_back(parse_region(item.as<std::string>(), "landscape.regions"));
                } else {
                    parse_error("landscape.regions", "expected a region or a list of regions");
                }
            }
        }
        if (const YAML::Node t = root["output"]) {
            require_keys(t, "output", {"dir"});
            if (t["dir"]) c.output_dir = t["dir"].as<std::string>();
        }
        if (root["seed"]) c.seed = integer(root["seed"], "seed");
    } catch (const YAML::Exception& e) {
        fail(ErrorKind::Parse, std::string("malformed configuration: ") + e.what());
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read configuration " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string emit_config(const RunConfig& c) {
    YAML::Node root(YAML::NodeType::Map);

    YAML::Node obstacle(YAML::NodeType::Map);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            obstacle["center"] = pair(s.center);
            if constexpr (std::is_same_v<T, Disk>) {
                obstacle["shape"] = "disk";
                obstacle["radius"] = shortest(s.radius);
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                obstacle["shape"] = "ellipse";
                obstacle["semi_axes"] = pair({s.semi_a, s.semi_b});
                obstacle["tilt"] = shortest(s.tilt);
            } else {
                obstacle["shape"] = "star";
                obstacle["r0"] = shortest(s.r0);
                obstacle["cos"] = list(s.cos_coeffs);
                obstacle["sin"] = list(s.sin_coeffs);
            }
        },
        c.obstacle.shape);
    obstacle["panels"] = c.obstacle.panels;
    root["obstacle"] = obstacle;

    root["grid"]["half_width"] = shortest(c.grid.half_width);
    root["grid"]["h"] = format_spacing(c.grid.h);

    root["physics"]["b"] = shortest(c.physics.b);
    root["physics"]["gamma"] = c.physics.gamma ? shortest(*c.physics.gamma) : std::string("critical");
    root["physics"]["eps"] = list(c.physics.eps);

    root["regime"]["sigma"] = shortest(c.regime.sigma);
    root["regime"]["delta"] = shortest(c.regime.delta);
    root["regime"]["theta1"] = shortest(c.regime.theta1);
    root["regime"]["theta2"] = shortest(c.regime.theta2);
    root["regime"]["region"] = to_string(c.regime.region);

    root["solver"]["max_iterations"] = c.solver.max_iterations;
    root["solver"]["relaxation"] = shortest(c.solver.relaxation);
    root["solver"]["mu_tolerance"] = shortest(c.solver.mu_tolerance);
    root["solver"]["energy_tolerance"] = shortest(c.solver.energy_tolerance);
    root["solver"]["patch_h"] = format_spacing(c.solver.patch_h);

    root["checks"]["regime2_b"] = list(c.checks.regime2_b);
    root["checks"]["layer_b"] = shortest(c.checks.layer_b);
    root["checks"]["large_panels"] = c.checks.large_panels;
    root["checks"]["layer_patch_h"] = format_spacing(c.checks.layer_patch_h);
    root["checks"]["symmetry_pairs"] = c.checks.symmetry_pairs;
    root["checks"]["probes"] = c.checks.probes;

    YAML::Node regions(YAML::NodeType::Sequence);
    for (RegionKind k : c.landscape_regions) regions.push_back(std::string(to_string(k)));
    regions.SetStyle(YAML::EmitterStyle::Flow);
    root["landscape"]["regions"] = regions;

    root["output"]["dir"] = c.output_dir;
    root["seed"] = c.seed;

    YAML::Emitter out;
    out << root;
    return std::string(out.c_str()) + "\n";
}

}  // namespace strip_vortex
