#pragma once

#include "ssp/mces.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ssp::cli {

// Exit codes of the ssp-mces binary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitAssumption = 3;
inline constexpr int kExitOutput = 4;

struct ExperimentConfig {
    std::filesystem::path mdp_path;  // empty when a fixture is used
    std::string fixture;             // "two-state" or "loop-or-exit"
    double alpha = 0.9;
    MCESConfig mces;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output_dir;
    double tol = 0.2;  // convergence_summary tolerance
};

/// Parses a run configuration. Relative paths are resolved against base_dir.
/// Throws ConfigError on missing or inconsistent fields.
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir = {});

Mdp resolve_mdp(const ExperimentConfig& config);

int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

struct FigureOptions {
    double alpha = 0.9;
    std::size_t iterations = 200000;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<double> p_grid{0.2, 0.35, 0.5, 0.65, 0.8};
    ValueVector initial{2.0, 0.0};
    std::filesystem::path output_dir;
};

int cmd_figure(const FigureOptions& options, std::ostream& out, std::ostream& err);

/// Iteration indices kept in figure CSVs: every t below 10, then about
/// 20 points per decade, always including the last record.
std::vector<std::size_t> log_grid(std::size_t last);

/// Entry point shared by main() and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ssp::cli
