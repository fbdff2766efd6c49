#pragma once

// Brute-force reference values: exact spectral radii of small nonnegative
// matrices, long power iteration for larger ones, and exhaustive
// Collatz-Wielandt searches over a simplex grid in dimension <= 3.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "conerad/cone.hpp"
#include "conerad/homog_map.hpp"
#include "conerad/matrix.hpp"

namespace conerad::oracle {

enum class Method { CharPoly, LongPowerIteration, GridSearch };

const char* to_string(Method method);

struct GraphDiagnostics {
    bool irreducible = false;
    /// gcd of cycle lengths of the irreducible graph; 0 when reducible.
    std::size_t period = 0;
    bool primitive() const noexcept { return irreducible && period == 1; }
};

struct OracleReport {
    double value = 0.0;
    Method method = Method::CharPoly;
    /// Rigorous enclosure where available (power iteration, grid search);
    /// equal to value for the characteristic polynomial.
    double lower = 0.0;
    double upper = 0.0;
    std::string certificate;
    std::optional<ConeVector> eigenvector;
    std::optional<GraphDiagnostics> graph;
    std::size_t iterations = 0;
};

/// Coefficients c_0..c_n of det(lambda I - A) = sum_k c_k lambda^{n-k}, c_0 = 1.
std::vector<double> characteristic_polynomial(const Matrix& a);

/// Largest real root of the monic polynomial in [lo, hi]; nullopt if none.
std::optional<double> largest_real_root(const std::vector<double>& coeffs, double lo, double hi);

GraphDiagnostics graph_diagnostics(const Matrix& a);

/// Spectral radius of a square nonnegative matrix. Dimension <= 4 uses the
/// characteristic polynomial; larger matrices use up to 1e5 steps of the
/// shifted iteration x <- (A + I) x / sum((A + I) x) with Collatz-Wielandt
/// stopping. Throws DimensionError on non-square input.
OracleReport linear_radius_exact(const Matrix& a);

inline constexpr std::size_t kCharPolyMaxDim = 4;

/// The two branches of linear_radius_exact, callable on their own.
OracleReport linear_radius_charpoly(const Matrix& a);
OracleReport linear_radius_power(const Matrix& a);

inline constexpr std::size_t kDefaultGridPoints = 50;
inline constexpr std::size_t kGridMaxPower = 6;

/// Best [B^m x]_x^{1/m} over simplex grid points x and m = 1..6, and best
/// max_i ((B^k x)_i / x_i)^{1/k} over strictly positive grid points and
/// k = 1..6. The grid has points_per_axis - 1 subdivisions of each edge.
/// Throws DimensionError when the map's dimension exceeds 3.
OracleReport brute_force_bracket(const HomogeneousMap& map, std::size_t points_per_axis = kDefaultGridPoints);

} // namespace conerad::oracle
