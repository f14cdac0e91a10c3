#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include <pcot/errors.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"probabilistic-circuit optimal transport"};
    app.set_version_flag("--version", pcot_cli::kVersion);
    app.require_subcommand(1);
    pcot_cli::register_commands(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const pcot::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return pcot_cli::exit_code_for(e.code);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
