// speclab <command> --config <path> --out <dir> [--seed N]

#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "speclab/runner.hpp"

namespace {

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for spectral pairs and commuting extensions"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    for (const auto& [cmd, name] : speclab::command_names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run config")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "seed for randomized probes");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    }
    try {
        speclab::RunConfig rc;
        rc.command = speclab::parse_command(app.get_subcommands().front()->get_name());
        rc.config_path = config_path;
        rc.out_dir = out_dir;
        rc.seed = seed;
        const auto res = speclab::run(rc);
        for (const auto& v : res.report.verdicts())
            std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "\n";
        return res.exit_code;
    } catch (const speclab::Error& e) {
        std::cerr << "error: " << speclab::to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << one_line(e.what()) << "\n";
    }
    return 2;
}
