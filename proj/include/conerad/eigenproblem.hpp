#pragma once

// Positive eigenvectors and eigenfunctionals of order-preserving homogeneous
// maps, via three constructive schemes:
//   * normalized fixed points of the perturbed maps B + eps psi(.) u, eps -> 0;
//   * the monotone min-iteration x_k = min(B x_{k-1} / r + 2^{-k} u, u) for a
//     sub-eigenvector, optionally refined by the increasing orbit B^n x / r^n;
//   * resolvent functionals x -> x*(R_lambda x) normalized, lambda -> r+.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "conerad/cone.hpp"
#include "conerad/homog_map.hpp"
#include "conerad/spectral.hpp"

namespace conerad {

enum class EigenMode { SubEigen, Exact };

struct EigenTraceStep {
    /// eps for the perturbation scheme, k for the min-iteration / refinement.
    double parameter = 0.0;
    double lambda = 0.0;
    double residual = 0.0;
    std::size_t inner_iterations = 0;
};

struct EigenResult {
    /// Normalized so that psi(vector) = 1.
    ConeVector vector;
    double lambda = 0.0;
    /// lambda before correction (the perturbed eigenvalue, perturbation scheme only).
    double lambda_raw = 0.0;
    /// ||B(v) - lambda v||.
    double residual = 0.0;
    /// max_i (lambda v - B(v))_i^+, the violation of B(v) >= lambda v.
    double subeigen_defect = 0.0;
    EigenMode mode = EigenMode::SubEigen;
    bool converged = true;
    std::size_t iterations = 0;
    std::vector<EigenTraceStep> trace;
};

/// Inner fixed-point iteration failed; carries the trace so far.
class InnerIterationError : public Error {
public:
    InnerIterationError(const std::string& what, std::vector<EigenTraceStep> trace)
        : Error(what), trace_(std::move(trace)) {}
    const std::vector<EigenTraceStep>& trace() const noexcept { return trace_; }

private:
    std::vector<EigenTraceStep> trace_;
};

/// eps_n = 10^{-n}, n = first..last.
std::vector<double> default_eps_schedule(int first = 1, int last = 8);

/// For each eps (decreasing) finds the unique psi-normalized fixed direction of
/// B_eps = perturb(B, eps, u) by v <- B_eps(v) / psi(B_eps(v)), warm-started
/// from the previous eps. lambda_raw is the last lambda_eps; lambda is the
/// corrected psi(B(v)). Throws InnerIterationError when an inner iteration
/// exceeds max_inner, MapContractError when lambda_eps increases as eps
/// decreases, DegenerateBoundError when u is not strictly positive.
EigenResult solve_eigenvector_perturbation(const HomogeneousMap& map, const ConeVector& u,
                                           const std::vector<double>& eps_schedule, double inner_tol,
                                           std::size_t max_inner);

/// Min-iteration for B / r_est. Returns a psi-normalized x with
/// B(x) >= r_est x (mode SubEigen). Throws ZeroLimitError when x_k -> 0,
/// which certifies r_est > r_+(B); MapContractError when the sequence fails
/// to decrease.
EigenResult solve_subeigenvector_min(const HomogeneousMap& map, const ConeVector& u, double r_est,
                                     std::size_t k_max = 20000, double tol = 1e-13);

/// Starts the min-iteration at the bracket midpoint and bisects r_est toward
/// the bracket's lower end on each ZeroLimitError.
EigenResult solve_subeigenvector_auto(const HomogeneousMap& map, const ConeVector& u,
                                      const SpectralEstimate& bracket, std::size_t max_bisections = 60);

/// Increasing orbit x <- B(x) / r_est from a sub-eigenvector x0 <= c u.
/// Stops when ||x_{n+1} - x_n|| <= tol; returns mode Exact with residual
/// ||B(x) - r_est x|| of the psi-normalized limit. Throws MapContractError if
/// the orbit decreases (x0 not a sub-eigenvector), ScaleError if it leaves
/// every multiple of u (r_est underestimates r_+).
EigenResult refine_eigenvector_monotone(const HomogeneousMap& map, const ConeVector& x0, const ConeVector& u,
                                        double r_est, double tol = 1e-12, std::size_t max_iter = 100000);

using Functional = std::function<double(const ConeVector&)>;

struct EigenfunctionalEstimate {
    ConeVector probe_vector;
    double lambda_used = 0.0;
    /// Sampled sup of x -> x*(R_lambda x) over the unit cone sphere.
    double normalizer = 0.0;
    /// Radius used for the defect report (bracket value).
    double radius = 0.0;
    /// max over test points of |phi(Bx) - r phi(x)| / phi(x).
    double relative_defect = 0.0;
    /// max over test points of |phi(Bx) - r phi(x)|.
    double absolute_defect = 0.0;
    double phi_of_u = 0.0;
    std::size_t test_points = 0;
    std::uint64_t seed = 0;
    Functional evaluator;
};

/// lambda_n = r_upper (1 + 10^{-n}), n = 1..count.
std::vector<double> default_lambda_schedule(double r_upper, int count = 5);

/// phi(x) = x*(R_{lambda_n}(x)) / normalizer for the last lambda_n of the
/// schedule. For linear maps phi is linear and is evaluated through its
/// coefficients x*(R_lambda e_j); the sup over the unit cone sphere is then
/// attained at a basis vector. Otherwise the normalizer also samples
/// `samples` random unit cone vectors. Throws SpectralDomainError when the
/// schedule is not decreasing or reaches the bracket's upper bound.
EigenfunctionalEstimate estimate_eigenfunctional(const HomogeneousMap& map, const ConeVector& u,
                                                 const ConeVector& xstar, const std::vector<double>& lambda_schedule,
                                                 double trunc_tol, std::size_t samples = 256,
                                                 std::size_t test_points = 100,
                                                 std::uint64_t seed = kDefaultSeed);

/// phi(x) = sum_{k<p} r^{-k} psi_p(B^k x); turns psi_p o B^p = r^p psi_p into
/// phi o B = r phi.
Functional reduce_power_functional(Functional psi_p, const HomogeneousMap& map, double r, std::size_t p);

} // namespace conerad
