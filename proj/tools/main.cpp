#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "modalshm/pipeline.hpp"
#include "modalshm/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Run configuration JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir,
                    "Output directory (overrides the config's 'outputs')");
    cmd->add_option("--seed", args.seed, "Overrides the identification seed");
}

void emit_error(const char* type, const std::string& message) {
    std::cerr << "{\"error\":{\"type\":\"" << type << "\",\"message\":\"";
    for (char c : message) {
        if (c == '"' || c == '\\') std::cerr << '\\';
        if (c == '\n') {
            std::cerr << "\\n";
            continue;
        }
        std::cerr << c;
    }
    std::cerr << "\"}}\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modal identification and damage-index pipeline"};
    app.set_version_flag("--version", modalshm::version);
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Simulate scenarios and write time-series + FRF containers");
    CLI::App* identify = app.add_subcommand(
        "identify", "Sweep model orders and write diagrams + consolidated modes");
    CLI::App* indices = app.add_subcommand(
        "indices", "Compute damage reports against the baseline case");
    CLI::App* full_run = app.add_subcommand(
        "full-run", "simulate -> identify -> indices, then write the run manifest");
    for (CLI::App* cmd : {simulate, identify, indices, full_run}) {
        add_common(cmd, args);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        modalshm::RunConfig config = modalshm::parse_run_config(args.config_path);
        modalshm::StageOptions options;
        options.out_dir = args.out_dir;
        options.seed_override = args.seed;
        options.config_hash = modalshm::file_hash_hex(args.config_path);

        if (simulate->parsed()) {
            modalshm::cmd_simulate(config, options);
            std::cout << "simulated " << config.scenarios.size() << " case(s)\n";
        } else if (identify->parsed()) {
            modalshm::cmd_identify(config, options);
            std::cout << "identified " << config.scenarios.size() << " case(s)\n";
        } else if (indices->parsed()) {
            const auto reports = modalshm::cmd_indices(config, options);
            std::cout << "wrote " << reports.size() << " damage report(s)\n";
        } else if (full_run->parsed()) {
            const auto manifest = modalshm::cmd_full_run(config, options);
            std::cout << "run complete, manifest hash " << manifest.config_hash << "\n";
        }
    } catch (const std::invalid_argument& e) {
        emit_error("config", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return 1;
    }
    return 0;
}
