#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "strip_vortex/commands.hpp"
#include "strip_vortex/config_io.hpp"
#include "strip_vortex/errors.hpp"

namespace {

/// Exit status for a failure class: 2 for input problems, 3 for I/O, 4 for numerical failures.
int exit_status(strip_vortex::ErrorKind kind) {
    using strip_vortex::ErrorKind;
    switch (kind) {
        case ErrorKind::Parse:
        case ErrorKind::Configuration: return 2;
        case ErrorKind::Io: return 3;
        default: return 4;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady vortex patches in a strip with an obstacle"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool verbose = false;
    for (const std::string& name : strip_vortex::subcommand_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides STRIP_VORTEX_OUT and output.dir)");
        sub->add_flag("--verbose", verbose, "log progress to stderr");
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        strip_vortex::CommandContext ctx;
        ctx.config = strip_vortex::load_config(config_path);
        ctx.out_dir = strip_vortex::resolve_output_dir(out_dir, ctx.config);
        if (verbose) ctx.log = [](const std::string& line) { std::clog << "[strip-vortex] " << line << std::endl; };
        const int status = strip_vortex::run_subcommand(command, ctx);
        if (verbose) std::clog << "[strip-vortex] wrote " << ctx.out_dir.string() << std::endl;
        return status;
    } catch (const strip_vortex::Error& e) {
        std::cerr << "strip-vortex " << command << ": " << to_string(e.kind()) << " error: " << e.what() << "\n";
        return exit_status(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "strip-vortex " << command << ": " << e.what() << "\n";
        return 4;
    }
}
