#include "ghe/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Superposition checks for implicit solutions of the general heavenly equation"};
    app.require_subcommand(1);

    ghe::CommandOptions options;
    std::string scenario;
    std::size_t points = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::string out;

    struct Entry {
        ghe::Command command;
        const char* help;
    };
    const Entry entries[] = {
        {ghe::Command::verify, "Check every seed and the superposition on the sample cloud"},
        {ghe::Command::sample, "Write per-point fields, partials and residuals as CSV"},
        {ghe::Command::balance, "Evaluate the pairwise, n-term and reduced balance conditions"},
        {ghe::Command::fdcheck, "Compare closed-form partials with finite differences"},
    };
    for (const auto& e : entries) {
        CLI::App* sub = app.add_subcommand(std::string(ghe::command_name(e.command)), e.help);
        sub->add_option("scenario", scenario, "Scenario file (JSON)")->required();
        sub->add_option("--out", out, "Report path (default <stem>.<command>.json, CSV for sample)");
        sub->add_option("--points", points, "Override the number of sample points")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Override the sampling seed");
        sub->add_option("--tol", tol, "Override the residual tolerance")->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ghe::kExitConfigError;
    }

    CLI::App* used = app.get_subcommands().front();
    const auto command = ghe::parse_command(used->get_name());
    if (used->count("--out")) options.out = out;
    if (used->count("--points")) options.points = points;
    if (used->count("--seed")) options.seed = seed;
    if (used->count("--tol")) options.tol = tol;
    return ghe::run_command(*command, scenario, options, std::cout, std::cerr);
}
