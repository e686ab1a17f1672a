// rfv: batch driver for the residual distribution / finite volume solvers.
//
//   rfv run <config.json>
//   rfv convergence <config.json> --levels 16,32,64
//   rfv selftest
//
// Exit status: 0 success, 1 selftest failure or internal error, 2 bad
// configuration or arguments, 3 solver left the admissible set, 4 bad geometry.

#include "rfv/driver.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int exit_code(const rfv::Error& e) {
    if (dynamic_cast<const rfv::ConfigError*>(&e) || dynamic_cast<const rfv::ArgumentError*>(&e)) return 2;
    if (dynamic_cast<const rfv::DomainError*>(&e)) return 3;
    if (dynamic_cast<const rfv::GeometryError*>(&e)) return 4;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rfv: residual distribution and multidimensional finite volume solvers"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the problem described by a JSON config");
    run->add_option("config", config_path, "config file")->required();

    std::string conv_path;
    std::vector<int> levels;
    auto* conv = app.add_subcommand("convergence", "Mesh refinement study with observed orders");
    conv->add_option("config", conv_path, "config file")->required();
    conv->add_option("--levels", levels, "resolutions, e.g. 16,32,64")->delimiter(',')->required();

    int samples = 1000;
    auto* self = app.add_subcommand("selftest", "Flux recovery on the element graph library");
    self->add_option("--samples", samples, "random residual sets per graph");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        rfv::configure_threads();
        if (run->parsed()) {
            const rfv::RunResult r = rfv::run(rfv::load_config(config_path), std::cout);
            return r.passed ? 0 : 1;
        }
        if (conv->parsed()) {
            rfv::convergence(rfv::load_config(conv_path), levels, std::cout);
            return 0;
        }
        rfv::RunConfig c;
        c.problem = "flux-recovery-selftest";
        c.n = samples;
        const rfv::RunResult r = rfv::run(c, std::cout);
        return r.passed ? 0 : 1;
    } catch (const rfv::Error& e) {
        std::cerr << "rfv: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "rfv: internal error: " << e.what() << "\n";
        return 1;
    }
}
