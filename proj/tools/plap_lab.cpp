// plap_lab: command-line driver for the singular p-Laplacian solvers.
//
//   plap_lab [command] [--config run.ini] [--out dir] [--set key=value]...

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "plap/run_config.hpp"
#include "plap/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Finite-difference solvers for -Delta_p u = lambda u^-alpha + f(x, u, grad u)"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    app.add_option("command", command, "Command (overrides the config file's `command` key)")
        ->check(CLI::IsMember(plap::known_commands()));
    app.add_option("--config", config_path, "INI-style key=value file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides output.directory)");
    app.add_option("--set", overrides, "Override one key, e.g. --set grid.n=511")->allow_extra_args(false);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : plap::kExitConfig;
    }

    if (!command.empty()) overrides.insert(overrides.begin(), "command=" + command);
    if (!out_dir.empty()) overrides.push_back("output.directory=" + out_dir);

    plap::RunConfig cfg;
    try {
        cfg = config_path.empty() ? plap::parse_overrides(overrides) : plap::parse_config_file(config_path, overrides);
    } catch (const plap::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        plap::write_failure(out_dir.empty() ? "out" : out_dir, plap::to_string(e.kind()), e.what(), plap::kExitConfig);
        return plap::kExitConfig;
    }
    return plap::run(cfg, std::cout);
}
