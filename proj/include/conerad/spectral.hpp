#pragma once

// Cone spectral radius r_+(B) of an order-preserving homogeneous map:
// the power-quotient limit ||B^n u||^{1/n}, Collatz-Wielandt bounds, a
// certified bracket built from them, and the truncated left resolvent.

#include <cstddef>
#include <vector>

#include "conerad/cone.hpp"
#include "conerad/homog_map.hpp"

namespace conerad {

/// Trailing window used for the Cesaro mean of log ||B y_k||.
inline constexpr std::size_t kPowerQuotientWindow = 20;

struct SpectralEstimate {
    double value = 0.0;
    double cw_lower = 0.0;
    double cw_upper = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// log ||B(y_k)|| for the normalized iterates y_k.
    std::vector<double> log_norm_trace;
    /// Bounds obtained at iterate k (not the running best).
    std::vector<double> lower_trace;
    std::vector<double> upper_trace;
    /// Vector x with B(x) >= cw_lower * x.
    ConeVector lower_witness;
    /// Strictly positive vector w with B(w) <= cw_upper * w.
    ConeVector upper_witness;
};

/// r_+(B) = lim ||B^n u||^{1/n}, computed with renormalized iterates and a
/// trailing-window mean of the log growth. Collatz-Wielandt bounds are
/// tracked along the way; converged means the bracket closed to tol or the
/// windowed log growth became stationary to tol.
SpectralEstimate radius_power_quotient(const HomogeneousMap& map, const ConeVector& u,
                                       std::size_t max_iter = 10000, double tol = 1e-8);

/// Least alpha with B^k u <= alpha^k u, i.e. ||B^k u||_u^{1/k}. An upper bound
/// for r_+(B) when u is an order bound; +infinity when B^k u leaves supp(u).
double cw_upper(const HomogeneousMap& map, const ConeVector& u, std::size_t k);

/// [B^m x]_x^{1/m}; always a lower bound for r_+(B).
double cw_lower(const HomogeneousMap& map, const ConeVector& x, std::size_t m);

/// Certified bracket [cw_lower, cw_upper] for r_+(B). Requires u strictly
/// positive. Stops when upper - lower <= tol * max(1, lower).
///
/// Bounds are evaluated at every iterate: the lower bound at y_k (and at
/// copies with negligible entries zeroed), the upper bound at y_k + 2^{-k} u.
/// Each bound is widened by a rounding allowance of 8 (n + 1) machine
/// epsilons so the bracket stays valid in floating point. The iterate is
/// advanced by y <- normalize(B(y)/||B(y)|| + y), whose fixed points are the
/// eigenvectors of B and which does not cycle on periodic maps.
SpectralEstimate radius_bracket(const HomogeneousMap& map, const ConeVector& u, double tol = 1e-8,
                                std::size_t max_iter = 10000);

struct ResolventResult {
    ConeVector value;
    std::size_t terms = 0;
    double last_term_norm = 0.0;
    /// Certified bound on the norm of the omitted tail.
    double tail_bound = 0.0;
};

/// Raised when the resolvent series did not meet its truncation criterion.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, ConeVector partial_sum, std::size_t terms)
        : Error(what), partial_sum_(std::move(partial_sum)), terms_(terms) {}
    const ConeVector& partial_sum() const noexcept { return partial_sum_; }
    std::size_t terms() const noexcept { return terms_; }

private:
    ConeVector partial_sum_;
    std::size_t terms_;
};

/// Left resolvent R_lambda(x) = sum_n lambda^{-n-1} B^n(x), which satisfies
/// R_lambda(Bx) = lambda R_lambda(x) - x.
///
/// The tail after term t_n is bounded by ||t_n||_w ||w|| q / (1 - q) with
/// q = cw_upper / lambda and w the bracket's upper witness. Summation stops
/// once ||t_n|| < trunc_tol and max(1, lambda) times that tail bound is below
/// trunc_tol. Throws SpectralDomainError when lambda is not above a certified
/// upper bound of r_+(B), TruncationError when max_terms is reached.
ResolventResult resolvent_apply(const HomogeneousMap& map, double lambda, const ConeVector& x,
                                double trunc_tol, std::size_t max_terms);

/// Same, reusing an existing bracket as the admissibility certificate.
ResolventResult resolvent_apply(const HomogeneousMap& map, double lambda, const ConeVector& x,
                                double trunc_tol, std::size_t max_terms,
                                const SpectralEstimate& certificate);

/// Rounding allowance applied to Collatz-Wielandt bounds in dimension n.
double cw_rounding_allowance(std::size_t n);

} // namespace conerad
