// Command-line front end: one subcommand per result family, all driven by
// scenario files.

#include "nearfield/errors.hpp"
#include "nearfield/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options
{
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Options& opts)
{
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("scenario", opts.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "random seed for Monte Carlo results");
    sub->add_option("--out", opts.out, "output file (default: the scenario's 'output' key, else stdout)");
    sub->add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    return sub;
}

int run(CLI::App& app, const Options& opts)
{
    using namespace nearfield;
    auto scenario = load_scenario(opts.scenario);
    if (opts.seed) {
        scenario.rays.seed = *opts.seed;
    }
    const Format format = format_from_name(opts.format.empty() ? scenario.format : opts.format);
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "validate") {
        std::cout << "ok: " << scenario.name << '\n';
        return 0;
    }
    const auto command = command_from_name(name);
    const auto table = run_scenario(scenario, *command);
    const std::filesystem::path out = opts.out.empty() ? scenario.output : std::filesystem::path(opts.out);
    if (out.empty()) {
        emit(table, format, std::cout);
    } else {
        emit(table, format, out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Near-field matter-wave interferometry toolkit"};
    app.require_subcommand(1);
    Options opts;
    add_command(app, "carpet", "near-field intensity carpet behind the first grating", opts);
    add_command(app, "visibility", "quantum and classical fringe visibility", opts);
    add_command(app, "power-sweep", "visibility versus laser grating power", opts);
    add_command(app, "velocity-sweep", "visibility versus mean beam velocity", opts);
    add_command(app, "decohere", "visibility under an environmental decoherence channel", opts);
    add_command(app, "otima-map", "time-domain visibility over pulse delay and photon number", opts);
    add_command(app, "deflect", "Stark deflection fringe shift", opts);
    add_command(app, "csl-map", "critical mass over the collapse parameters", opts);
    add_command(app, "validate", "check a scenario file without running it", opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return run(app, opts);
    } catch (const nearfield::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
