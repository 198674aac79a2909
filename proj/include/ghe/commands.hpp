#pragma once

#include "ghe/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace ghe {

enum class Command { verify, sample, balance, fdcheck };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command c);

/// Exit codes shared by every command.
inline constexpr int kExitPass = 0;
inline constexpr int kExitResidualFailure = 1;
inline constexpr int kExitConfigError = 2;

struct CommandOptions {
    std::optional<std::filesystem::path> out;
    std::optional<std::size_t> points;  // box: point count; points/grid: keep the first N
    std::optional<std::uint64_t> seed;  // box sampling seed
    std::optional<double> tol;          // residual tolerance
};

/// Apply command-line overrides to a loaded scenario.
void apply_overrides(Scenario& scenario, const CommandOptions& options);

/// Where a command writes its file when --out is not given:
/// <stem>.<command>.json, or <stem>.sample.csv for sample.
std::filesystem::path default_output(const std::filesystem::path& scenario_path, Command c);

/// Fixed CSV header for a run with n seeds.
std::string sample_header(std::size_t seeds);

/// Run one command on an already-loaded scenario. Writes the human summary
/// to `text` and the report (JSON, or CSV for sample) to `output`.
int run_verify(const Scenario& scenario, const std::filesystem::path& output, std::ostream& text);
int run_sample(const Scenario& scenario, const std::filesystem::path& output, std::ostream& text);
int run_balance(const Scenario& scenario, const std::filesystem::path& output, std::ostream& text);
int run_fdcheck(const Scenario& scenario, const std::filesystem::path& output, std::ostream& text);

/// Load, override, run. Configuration problems are reported on `err` and
/// return kExitConfigError.
int run_command(Command c, const std::filesystem::path& scenario_path, const CommandOptions& options,
                std::ostream& text, std::ostream& err);

}  // namespace ghe
