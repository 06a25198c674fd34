#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mpemba/commands.hpp"

namespace fs = std::filesystem;
using namespace mpemba;

namespace {

void write_file(const fs::path& dir, const std::string& name, const std::string& content)
{
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + (dir / name).string() + "'");
    }
    out << content;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mpemba-enhanced thermometry: relaxation, Fisher information, certificates, protocol"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    std::string model;
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--output", output_dir, "output directory (overrides output_path)");
    app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--model", model, "probe model")->check(CLI::IsMember({"qubit", "lambda"}));

    auto* relax = app.add_subcommand("relax", "population relaxation and inversion record -> relax.csv");
    auto* qfi = app.add_subcommand("qfi", "Fisher information along trajectories or over (p0, t) -> qfi.csv");
    auto* theorem = app.add_subcommand("theorem", "theorem certificate -> theorem.txt");
    auto* protocol = app.add_subcommand("protocol", "shot-based thermometry protocol -> CSV bundle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    RunConfig config;
    try {
        RunConfig base;
        if (!model.empty()) {
            base.model = model;
        }
        if (!config_path.empty()) {
            config = load_config(config_path, base);
        } else {
            config = base;
        }
        if (!model.empty()) {
            config.model = model;
        }
        if (seed) {
            config.seed = *seed;
        }
        if (!output_dir.empty()) {
            config.output_path = output_dir;
        }
        config.validate();
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    const fs::path dir = config.output_path;
    try {
        if (relax->parsed()) {
            write_file(dir, "relax.csv", relax_csv(config));
        } else if (qfi->parsed()) {
            write_file(dir, "qfi.csv", qfi_csv(config));
        } else if (theorem->parsed()) {
            write_file(dir, "theorem.txt", theorem_text(config));
        } else if (protocol->parsed()) {
            const auto out = protocol_bundle(config);
            for (const auto& f : out.files) {
                write_file(dir, f.name, f.content);
            }
            if (out.failed_step) {
                std::cerr << "protocol step '" << *out.failed_step << "' failed: " << out.error << '\n';
            }
            return out.exit_code;
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
