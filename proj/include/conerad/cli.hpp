#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "conerad/io.hpp"

namespace conerad::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Command { Radius, Eigen, Functional, TwosexAssess, TwosexSimulate, Validate };

const char* to_string(Command command);
std::optional<Command> command_from_string(const std::string& name);

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kNonConvergence = 2 };

/// Named tolerances with their defaults; integer-valued entries are counts.
std::map<std::string, double> default_tolerances();

struct RunConfig {
    Command command = Command::Radius;
    std::string input_path;
    std::string output_dir = ".";
    /// Overrides the seed in the input file.
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

/// Validated, defaulted contents of an input file for one command.
struct InputConfig {
    Command command = Command::Radius;
    std::map<std::string, double> tolerances = default_tolerances();
    std::uint64_t seed = kDefaultSeed;
    io::MapSpec map;
    std::optional<std::vector<double>> u;

    // eigen
    std::string eigen_method = "perturbation";
    std::vector<double> eps_schedule = default_eps_schedule();
    std::optional<double> r_est;

    // functional
    std::optional<std::vector<double>> probe;
    std::vector<double> lambda_schedule;
    /// Defaults to 8 for linear maps and 3 otherwise: without a matrix every
    /// evaluation of phi sums a resolvent series of about 10^count terms.
    std::optional<int> lambda_count;
    std::size_t samples = 256;
    std::size_t test_points = 100;

    // twosex-assess
    std::vector<std::vector<double>> initial_distributions;
    std::size_t growth_years = 200;

    // twosex-simulate
    std::size_t years = 20;
    std::optional<std::vector<double>> f0;
    bool densities = false;

    // validate
    std::size_t trials = 1000;
    double property_tol = 1e-9;
};

/// Strict parse: unknown keys, wrong types, missing fields and nonpositive
/// tolerances raise ConfigError naming the field path.
InputConfig parse_input(const io::Json& document, Command command);

/// Reads and parses a file; IO failures raise std::runtime_error verbatim.
InputConfig parse_config(const std::string& path, Command command);

/// Executes the command, writes result.json, an optional CSV trace and
/// manifest.json into output_dir, and returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace conerad::cli
