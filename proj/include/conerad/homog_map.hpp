#pragma once

// Bounded positively homogeneous maps B: X_+ -> X_+ on a ConeSpace, with the
// combinators the solvers need (powers, composition, the psi(.)u perturbation)
// and a randomized checker for homogeneity / order preservation.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "conerad/cone.hpp"
#include "conerad/matrix.hpp"

namespace conerad {

inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Structural claims made about a map. Linear implies a matrix is attached.
struct MapFlags {
    bool linear = false;
    bool superadditive = false;
    bool strictly_increasing = false;
};

/// Raw evaluator. Must be pure: same input, same output, no hidden state.
using Evaluator = std::function<std::vector<double>(const ConeVector&)>;

class HomogeneousMap;
ConeVector evaluate(const HomogeneousMap& map, const ConeVector& x);

class HomogeneousMap {
public:
    /// Wraps a nonlinear evaluator. flags.linear must be false; use linear().
    HomogeneousMap(ConeSpace space, Evaluator evaluator, MapFlags flags = {},
                   std::string name = "custom");

    static HomogeneousMap linear(Matrix matrix, ConeSpace space);
    /// Linear map on R^n with the L1 norm.
    static HomogeneousMap linear(Matrix matrix);

    const ConeSpace& space() const noexcept { return state_->space; }
    const MapFlags& flags() const noexcept { return state_->flags; }
    const std::optional<Matrix>& matrix() const noexcept { return state_->matrix; }
    const std::string& name() const noexcept { return state_->name; }
    std::size_t dimension() const noexcept { return state_->space.dimension(); }

    ConeVector operator()(const ConeVector& x) const;

    /// alpha * B, alpha >= 0.
    HomogeneousMap scaled(double alpha) const;
    /// Same evaluator viewed in a space with another norm.
    HomogeneousMap with_space(ConeSpace space) const;

private:
    friend ConeVector evaluate(const HomogeneousMap& map, const ConeVector& x);
    friend HomogeneousMap perturb(const HomogeneousMap& map, double eps, const ConeVector& u,
                                  const ConeSpace& space);

    struct State {
        ConeSpace space;
        Evaluator evaluator;
        MapFlags flags;
        std::optional<Matrix> matrix;
        std::string name;
    };
    explicit HomogeneousMap(std::shared_ptr<const State> state) : state_(std::move(state)) {}

    std::shared_ptr<const State> state_;
};

/// B(x) with contract checks: x in the cone, output finite and in the cone.
/// Throws MapContractError on a bad output.
ConeVector evaluate(const HomogeneousMap& map, const ConeVector& x);

/// B^n(x); n = 0 returns x.
ConeVector power_apply(const HomogeneousMap& map, const ConeVector& x, std::size_t n);

/// C o B.
HomogeneousMap compose(const HomogeneousMap& outer, const HomogeneousMap& inner);

/// B^m as a map, m >= 1.
HomogeneousMap power_map(const HomogeneousMap& map, std::size_t m);

/// x -> B(x) + eps * psi(x) * u with psi the norm of `space` restricted to the
/// cone. The result is strictly increasing in the sense that psi(x) < psi(y),
/// x <= y forces a uniform relative gap between the images.
HomogeneousMap perturb(const HomogeneousMap& map, double eps, const ConeVector& u,
                       const ConeSpace& space);

/// x -> min_k A_k x, entrywise. Order preserving, superadditive.
HomogeneousMap min_linear_map(const std::vector<Matrix>& matrices, ConeSpace space);
/// x -> max_k A_k x, entrywise. Order preserving, subadditive.
HomogeneousMap max_linear_map(const std::vector<Matrix>& matrices, ConeSpace space);

struct OperatorNormEstimate {
    double value = 0.0;
    bool exact = false;
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
};

/// ||B||_+ = sup { ||Bx|| : x in X_+, ||x|| <= 1 }. Exact for linear maps;
/// otherwise the max over basis directions and `samples` random unit cone
/// vectors, which is a certified lower bound.
OperatorNormEstimate op_norm_plus(const HomogeneousMap& map, std::size_t samples,
                                  std::uint64_t seed = kDefaultSeed);

/// Entrywise |N(0,1)| draws scaled to the unit sphere of the space's norm.
ConeVector random_unit_cone_vector(const ConeSpace& space, std::mt19937_64& rng);

struct PropertyViolation {
    std::string property;
    std::size_t trial = 0;
    double defect = 0.0;
};

struct PropertyReport {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::size_t homogeneity_violations = 0;
    std::size_t monotonicity_violations = 0;
    std::size_t superadditivity_violations = 0;
    double max_homogeneity_defect = 0.0;
    double max_monotonicity_defect = 0.0;
    double max_superadditivity_defect = 0.0;
    /// First few violations, for diagnostics.
    std::vector<PropertyViolation> examples;

    std::size_t total_violations() const noexcept {
        return homogeneity_violations + monotonicity_violations + superadditivity_violations;
    }
    bool ok() const noexcept { return total_violations() == 0; }
};

/// Randomized check of B(ax) = aB(x), B(x) <= B(x+d), and (when claimed)
/// B(x+y) >= B(x) + B(y). Defects are measured relative to the size of the
/// compared outputs. Violations are reported, never thrown.
PropertyReport verify_properties(const HomogeneousMap& map, std::size_t trials, double tol,
                                 std::uint64_t seed = kDefaultSeed);

} // namespace conerad
