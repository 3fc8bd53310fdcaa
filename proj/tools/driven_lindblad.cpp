// driven_lindblad.cpp — command-line front end: simulate | check-validity | sweep

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "driven/run.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
};

int load_config(const CommonArgs& args, driven::RunConfig& cfg) {
    try {
        if (!args.config_path.empty()) cfg = driven::RunConfig::from_file(args.config_path);
        for (const std::string& kv : args.overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw driven::ConfigError("--set expects key=value, got '" + kv + "'");
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                const auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        }
        return driven::exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return driven::exit_config;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven-lindblad: dissipative dynamics of a periodically driven qubit"};
    app.require_subcommand(1);

    CommonArgs sim_args, check_args, sweep_args;
    std::string engine_override, out_path, sweep_key, sweep_values, sweep_out = "sweep";

    CLI::App* simulate = app.add_subcommand("simulate", "run one engine and emit a CSV trajectory");
    simulate->add_option("--config", sim_args.config_path, "config file (key = value lines)");
    simulate->add_option("--engine", engine_override, "tdme | adme | unitary | tn | analytic");
    simulate->add_option("--out", out_path, "output CSV path (default: stdout)");
    simulate->add_option("--set", sim_args.overrides, "override a config key, key=value")
        ->take_all();

    CLI::App* check = app.add_subcommand("check-validity", "evaluate the regime conditions");
    check->add_option("--config", check_args.config_path, "config file");
    check->add_option("--set", check_args.overrides, "override a config key")->take_all();

    CLI::App* sweep = app.add_subcommand("sweep", "run simulate over a list of values of one key");
    sweep->add_option("--config", sweep_args.config_path, "config file");
    sweep->add_option("--key", sweep_key, "numeric config key to sweep")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--out", sweep_out, "output prefix (default: sweep)");
    sweep->add_option("--set", sweep_args.overrides, "override a config key")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? driven::exit_ok : driven::exit_config;
    }

    if (simulate->parsed()) {
        driven::RunConfig cfg;
        if (const int code = load_config(sim_args, cfg); code != driven::exit_ok) return code;
        if (!engine_override.empty()) {
            try {
                cfg.set("engine", engine_override);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return driven::exit_config;
            }
        }
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "config error: cannot open output file '" << out_path << "'\n";
                return driven::exit_config;
            }
            return driven::run_simulate(cfg, out, std::cerr);
        }
        return driven::run_simulate(cfg, std::cout, std::cerr);
    }

    if (check->parsed()) {
        driven::RunConfig cfg;
        if (const int code = load_config(check_args, cfg); code != driven::exit_ok) return code;
        return driven::run_check_validity(cfg, std::cout, std::cerr);
    }

    driven::RunConfig cfg;
    if (const int code = load_config(sweep_args, cfg); code != driven::exit_ok) return code;
    std::vector<std::string> values;
    std::stringstream ss(sweep_values);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) values.push_back(item);
    return driven::run_sweep(cfg, sweep_key, values, sweep_out, std::cerr);
}
