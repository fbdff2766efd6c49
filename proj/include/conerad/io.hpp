#pragma once

// JSON and CSV encodings of inputs and results, and the strict config
// reader shared by the command-line tool and the tests.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "conerad/cone.hpp"
#include "conerad/eigenproblem.hpp"
#include "conerad/homog_map.hpp"
#include "conerad/matrix.hpp"
#include "conerad/oracle.hpp"
#include "conerad/spectral.hpp"
#include "conerad/twosex.hpp"

namespace conerad::io {

using Json = nlohmann::ordered_json;

/// Reads one JSON object, tracking consumed keys so that finish() can reject
/// the rest. All errors are ConfigError with a dotted field path.
class ObjectReader {
public:
    ObjectReader(const Json& value, std::string path);

    const std::string& path() const noexcept { return path_; }
    bool has(const std::string& key) const;
    /// Marks the key consumed; nullptr when absent.
    const Json* get(const std::string& key);
    const Json& require(const std::string& key);

    double number(const std::string& key, std::optional<double> fallback = std::nullopt);
    double positive(const std::string& key, std::optional<double> fallback = std::nullopt);
    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt);
    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt);
    bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt);

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    /// Throws on the first key that was never consumed.
    void finish() const;

private:
    const Json& value_;
    std::string path_;
    std::set<std::string> used_;
};

double as_number(const Json& value, const std::string& path);
std::vector<double> as_vector(const Json& value, const std::string& path);
/// A scalar becomes a length-1 vector.
std::vector<double> as_field(const Json& value, const std::string& path);
Matrix as_matrix(const Json& value, const std::string& path);

/// {"kind": "interval", ...} etc.; see README for the schema.
twosex::ModelConfig parse_model(const Json& value, const std::string& path);

struct MapSpec {
    /// "linear", "min_linear", "max_linear" or "twosex".
    std::string kind = "linear";
    std::vector<Matrix> matrices;
    std::optional<twosex::ModelConfig> model;
    std::optional<ConeSpace> space;
};

MapSpec parse_map(const Json& value, const std::string& path);

struct BuiltMap {
    HomogeneousMap map;
    std::optional<twosex::TwoSexModel> model;
};

BuiltMap build_map(const MapSpec& spec);

Json to_json(const ConeVector& x);
Json to_json(const ConeSpace& space);
Json to_json(const SpectralEstimate& est, bool include_traces = false);
Json to_json(const EigenResult& result);
Json to_json(const PropertyReport& report);
Json to_json(const oracle::OracleReport& report);
Json to_json(const twosex::PersistenceReport& report);
Json to_json(const EigenfunctionalEstimate& est);

/// Rows of iteration, log_norm, lower, upper.
void write_spectral_trace(std::ostream& os, const SpectralEstimate& est);
/// Rows of step, parameter, lambda, residual, inner_iterations.
void write_eigen_trace(std::ostream& os, const EigenResult& result);
/// Rows of year, log_total_mass, gamma_estimate and, optionally, densities.
void write_trajectory(std::ostream& os, const twosex::Trajectory& trajectory, bool densities);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

} // namespace conerad::io
