#pragma once

// Discretized spatially distributed two-sex population with one short mating
// season per year. Newborn density f is dispersed by female and male kernels
// (survival and sex determination included), then mated cellwise:
//
//     B(f)_i = phi_i((K_female f)_i, (K_male f)_i),
//     (K f)_i = sum_j k(i, j) f_j w_j     (midpoint quadrature, w_j cell areas).
//
// The state space is L1 of the habitat, i.e. R^n with the weighted L1 norm.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "conerad/cone.hpp"
#include "conerad/eigenproblem.hpp"
#include "conerad/homog_map.hpp"
#include "conerad/matrix.hpp"
#include "conerad/spectral.hpp"

namespace conerad::twosex {

enum class Sex { Female, Male };

const char* to_string(Sex sex);

/// Column mass of a dispersal kernel exceeds one.
class KernelMassError : public Error {
public:
    KernelMassError(const std::string& what, Sex role, std::size_t cell)
        : Error(what), role_(role), cell_(cell) {}
    Sex role() const noexcept { return role_; }
    std::size_t cell() const noexcept { return cell_; }

private:
    Sex role_;
    std::size_t cell_;
};

/// Uniform cells on an interval or a rectangle.
class SpatialGrid {
public:
    static SpatialGrid interval(double a, double b, std::size_t n_cells);
    static SpatialGrid rectangle(std::array<double, 2> x_range, std::array<double, 2> y_range, std::size_t nx,
                                 std::size_t ny);

    std::size_t size() const noexcept { return weights_.size(); }
    int dims() const noexcept { return dims_; }
    const std::vector<std::array<double, 2>>& centers() const noexcept { return centers_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    /// Cell i spans [lower(i)[d], upper(i)[d]] along axis d.
    std::array<double, 2> lower(std::size_t i) const;
    std::array<double, 2> upper(std::size_t i) const;
    double measure() const noexcept;
    ConeSpace space() const { return ConeSpace(size(), weights_); }

private:
    int dims_ = 1;
    std::array<double, 2> x_range_{};
    std::array<double, 2> y_range_{};
    std::size_t nx_ = 0;
    std::size_t ny_ = 1;
    std::vector<std::array<double, 2>> centers_;
    std::vector<double> weights_;
};

struct MigrationKernel {
    /// density(i, j) = k(xi_i, eta_j), destination i, source j.
    Matrix density;
    Sex role = Sex::Female;
    /// quadrature(i, j) = density(i, j) * w_j, so (K f) = quadrature * f.
    Matrix quadrature;

    /// sum_i density(i, j) w_i: survival-and-stay probability of source j.
    std::vector<double> column_mass(const std::vector<double>& weights) const;
};

/// Builds a kernel from a density matrix and checks sub-stochastic columns.
/// Throws KernelMassError naming the first overfull source cell.
MigrationKernel make_kernel(Matrix density, Sex role, const SpatialGrid& grid);

enum class MatingKind { HarmonicMean, MinRate };

class MatingFunction {
public:
    /// beta(xi) x1 x2 / (x1 + x2).
    static MatingFunction harmonic_mean(std::vector<double> beta);
    /// min(beta1(xi) x1, beta2(xi) x2).
    static MatingFunction min_rate(std::vector<double> beta1, std::vector<double> beta2);

    MatingKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return beta1_.size(); }
    const std::vector<double>& beta() const noexcept { return beta1_; }
    const std::vector<double>& beta2() const noexcept { return beta2_; }
    /// psi(xi) = phi(xi, 1, 1).
    const std::vector<double>& psi_field() const noexcept { return psi_; }

    double operator()(std::size_t cell, double x1, double x2) const;
    /// Birth rates multiplied by c >= 0.
    MatingFunction scaled(double c) const;

private:
    MatingFunction(MatingKind kind, std::vector<double> beta1, std::vector<double> beta2);

    MatingKind kind_;
    std::vector<double> beta1_;
    std::vector<double> beta2_;
    std::vector<double> psi_;
};

double mating_value(const MatingFunction& mating, std::size_t cell, double x1, double x2);

enum class DispersalKind {
    /// Gaussian with length scale sigma; mass leaving the habitat is lost.
    Gaussian,
    /// Uniform over habitat cells within distance sigma of the source (the
    /// whole habitat when sigma is absent); all mass stays in the habitat.
    Uniform,
    /// Explicit density matrices.
    Custom,
};

struct GridConfig {
    int dims = 1;
    std::array<double, 2> x_range{0.0, 1.0};
    std::array<double, 2> y_range{0.0, 1.0};
    std::size_t nx = 1;
    std::size_t ny = 1;
};

struct DispersalConfig {
    DispersalKind kind = DispersalKind::Uniform;
    std::optional<double> sigma;
    std::optional<Matrix> female;
    std::optional<Matrix> male;
};

struct MatingConfig {
    MatingKind kind = MatingKind::HarmonicMean;
    /// Length 1 means a constant field.
    std::vector<double> beta{1.0};
    std::vector<double> beta2;
};

struct ModelConfig {
    GridConfig grid;
    DispersalConfig dispersal;
    double survival_female = 1.0;
    double survival_male = 1.0;
    /// Probability that a newborn is female.
    double sex_ratio = 0.5;
    MatingConfig mating;
};

class TwoSexModel {
public:
    TwoSexModel(SpatialGrid grid, MigrationKernel female, MigrationKernel male, MatingFunction mating);

    const SpatialGrid& grid() const noexcept { return grid_; }
    const MigrationKernel& female_kernel() const noexcept { return female_; }
    const MigrationKernel& male_kernel() const noexcept { return male_; }
    const MatingFunction& mating() const noexcept { return mating_; }
    /// u_i = max_j psi_i (k_f(i, j) + k_m(i, j)), so B(f) <= ||f||_1 u.
    const ConeVector& order_bound() const noexcept { return order_bound_; }
    ConeSpace space() const { return grid_.space(); }
    std::size_t size() const noexcept { return grid_.size(); }

    /// The same model with all birth rates multiplied by c.
    TwoSexModel with_scaled_births(double c) const;

    /// The next-year operator as a HomogeneousMap on the weighted L1 space.
    HomogeneousMap as_map() const;

private:
    SpatialGrid grid_;
    MigrationKernel female_;
    MigrationKernel male_;
    MatingFunction mating_;
    ConeVector order_bound_;
};

TwoSexModel build_model(const ModelConfig& config);

/// B(f) = F(K_female f, K_male f). Asserts B(f) <= psi (K_f f + K_m f) and
/// B(f) <= ||f||_1 u; throws ModelContractError on violation.
ConeVector step_next_year(const TwoSexModel& model, const ConeVector& f);

/// Start vector for the spectral routines: u itself when strictly positive,
/// otherwise u plus 1e-6 max(u) in every cell.
ConeVector positive_start(const TwoSexModel& model);

enum class Verdict { Persistence, Extinction, Inconclusive };

const char* to_string(Verdict verdict);

struct GrowthEstimate {
    std::size_t years = 0;
    double gamma = 0.0;
    double log_total_mass = 0.0;
};

struct AssessOptions {
    std::size_t max_iter = 100000;
    std::vector<double> eps_schedule = default_eps_schedule(1, 12);
    double inner_tol = 1e-13;
    std::size_t max_inner = 1000000;
    std::vector<ConeVector> initial_distributions;
    std::size_t growth_years = 200;
};

struct PersistenceReport {
    Verdict verdict = Verdict::Inconclusive;
    SpectralEstimate bracket;
    std::optional<EigenResult> eigen;
    std::string eigen_error;
    std::vector<GrowthEstimate> growth;
    bool start_regularized = false;
};

/// r_+(B) against 1: persistence if cw_lower > 1, extinction if cw_upper < 1,
/// inconclusive otherwise. Also computes the eigenvector by the perturbation
/// scheme and the growth factors of the requested initial distributions.
PersistenceReport assess_persistence(const TwoSexModel& model, double tol, const AssessOptions& options = {});

struct YearRecord {
    std::size_t year = 0;
    double log_total_mass = 0.0;
    /// (||B^n f0|| / ||f0||)^{1/n}; absent for year 0.
    std::optional<double> gamma_estimate;
    /// B^n f0 / ||B^n f0|| (zero vector once the population is extinct).
    ConeVector shape;
};

struct Trajectory {
    std::vector<YearRecord> years;
    /// Certified upper bound of r_+ used to check the growth estimates.
    double cw_upper = 0.0;
};

/// Yearly iteration with renormalized storage. Each gamma estimate is checked
/// against the certified growth bound alpha * C^{1/n}, C = ||f0||_w ||w|| / ||f0||
/// for the upper witness w of a Collatz-Wielandt bracket.
Trajectory simulate(const TwoSexModel& model, const ConeVector& f0, std::size_t years);

/// Least-squares slope of log total mass over the recorded years.
double log_mass_slope(const Trajectory& trajectory);

} // namespace conerad::twosex
