#include <string>

#include <CLI11.hpp>

#include "drsplit/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Inexact Douglas-Rachford splitting solver for monotone inclusions "
                 "0 in A(x) + B(x), with runtime convergence diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    drsplit::CliOptions options;
    std::string output_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "path to the run config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--output-dir", output_dir,
                        "override the output directory from the config");
    };

    CLI::App* solve = app.add_subcommand("solve", "run the solver and export the trace");
    add_common(solve);
    CLI::App* verify = app.add_subcommand(
        "verify", "run the solver, then every requested convergence check");
    add_common(verify);
    CLI::App* sweep = app.add_subcommand(
        "sweep", "run a grid over lambda, schedules and seeds");
    add_common(sweep);

    CLI11_PARSE(app, argc, argv);
    if (!output_dir.empty()) options.output_dir = output_dir;

    if (solve->parsed()) return drsplit::cmd_solve(config_path, options);
    if (verify->parsed()) return drsplit::cmd_verify(config_path, options);
    if (sweep->parsed()) return drsplit::cmd_sweep(config_path, options);
    return 1;
}
