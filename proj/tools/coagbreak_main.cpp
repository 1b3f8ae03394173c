// CLI entry point for the coagulation / collisional-breakage solver.
#include <CLI11.hpp>

#include "coagbreak/dispatch.hpp"

int main(int argc, char** argv) {
    CLI::App app{"deterministic solver for coagulation with collisional breakage"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int threads = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "path to the run configuration")
            ->required();
        cmd->add_option("--out", out_dir, "output directory (created if missing)");
        cmd->add_option("--threads", threads, "worker threads for the operators")
            ->check(CLI::PositiveNumber);
    };

    add_common(app.add_subcommand("run", "integrate the configured scenario"));
    add_common(app.add_subcommand("check-assumptions",
                                  "certify the model hypotheses on a sample lattice"));
    add_common(app.add_subcommand("study", "run the configured experiment suite"));
    add_common(app.add_subcommand("compare-analytic",
                                  "compare against an analytic special case"));

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    return coagbreak::dispatch(command, config_path, out_dir, threads);
}
