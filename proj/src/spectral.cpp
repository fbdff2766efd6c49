#include "conerad/spectral.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace conerad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_start_vector(const HomogeneousMap& map, const ConeVector& u, const char* who) {
    map.space().check_dimension(u);
    if (!u.in_cone() || u.is_zero()) {
        throw DegenerateBoundError(std::string(who) + ": start vector must be a nonzero cone vector");
    }
}

// Copy of y with entries below threshold * max(y) set to zero.
ConeVector truncated(const ConeVector& y, double threshold, bool& changed) {
    const double top = *std::max_element(y.begin(), y.end());
    std::vector<double> e = y.data();
    changed = false;
    for (double& v : e) {
        if (v > 0.0 && v < threshold * top) {
            v = 0.0;
            changed = true;
        }
    }
    return ConeVector(std::move(e));
}

double support_weight(std::size_t k) {
    // sigma_k = 2^{-k}, kept away from the subnormal range.
    return std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 1000)));
}

} // namespace

double cw_rounding_allowance(std::size_t n) { return 8.0 * static_cast<double>(n + 1) * DBL_EPSILON; }

double cw_upper(const HomogeneousMap& map, const ConeVector& u, std::size_t k) {
    require_start_vector(map, u, "cw_upper");
    if (k == 0) throw MapContractError("cw_upper: k must be >= 1");
    const double c = u_norm(power_apply(map, u, k), u);
    if (std::isinf(c)) return kInf;
    return std::pow(c, 1.0 / static_cast<double>(k));
}

double cw_lower(const HomogeneousMap& map, const ConeVector& x, std::size_t m) {
    require_start_vector(map, x, "cw_lower");
    if (m == 0) throw MapContractError("cw_lower: m must be >= 1");
    const double beta = lower_ratio(power_apply(map, x, m), x);
    return std::pow(beta, 1.0 / static_cast<double>(m));
}

SpectralEstimate radius_power_quotient(const HomogeneousMap& map, const ConeVector& u, std::size_t max_iter,
                                       double tol) {
    require_start_vector(map, u, "radius_power_quotient");
    const ConeSpace& space = map.space();
    const double kappa = cw_rounding_allowance(space.dimension());
    const bool regularize = u.strictly_positive();
    const ConeVector u_hat = (1.0 / space.norm(u)) * u;

    SpectralEstimate est;
    est.cw_upper = kInf;
    ConeVector y = u_hat;

    for (std::size_t k = 1; k <= max_iter; ++k) {
        est.iterations = k;
        const ConeVector z = evaluate(map, y);
        const double nz = space.norm(z);
        if (nz == 0.0) {
            // The orbit died: B^k u = 0.
            est.value = 0.0;
            est.cw_lower = 0.0;
            if (regularize) {
                est.cw_upper = 0.0;
                est.upper_witness = u_hat;
            }
            est.lower_trace.push_back(0.0);
            est.upper_trace.push_back(est.cw_upper);
            est.converged = true;
            return est;
        }
        est.log_norm_trace.push_back(std::log(nz));

        const double lower_k = lower_ratio(z, y) * (1.0 - kappa);
        if (lower_k >= est.cw_lower) {
            est.cw_lower = lower_k;
            est.lower_witness = y;
        }
        double upper_k = kInf;
        if (regularize) {
            const ConeVector w = axpy(y, support_weight(k), u_hat);
            upper_k = u_norm(evaluate(map, w), w) * (1.0 + kappa);
            if (upper_k <= est.cw_upper) {
                est.cw_upper = upper_k;
                est.upper_witness = w;
            }
        }
        est.lower_trace.push_back(lower_k);
        est.upper_trace.push_back(upper_k);

        y = (1.0 / nz) * z;

        if (est.cw_upper - est.cw_lower <= tol * std::max(1.0, est.cw_lower)) {
            est.converged = true;
            break;
        }
        if (k >= kPowerQuotientWindow) {
            const auto first = est.log_norm_trace.end() - static_cast<std::ptrdiff_t>(kPowerQuotientWindow);
            const auto [lo, hi] = std::minmax_element(first, est.log_norm_trace.end());
            if (*hi - *lo <= tol) {
                est.converged = true;
                break;
            }
        }
    }

    const std::size_t window = std::min(kPowerQuotientWindow, est.log_norm_trace.size());
    const double mean =
        std::accumulate(est.log_norm_trace.end() - static_cast<std::ptrdiff_t>(window), est.log_norm_trace.end(), 0.0) /
        static_cast<double>(window);
    est.value = std::clamp(std::exp(mean), est.cw_lower, std::max(est.cw_lower, est.cw_upper));
    return est;
}

SpectralEstimate radius_bracket(const HomogeneousMap& map, const ConeVector& u, double tol, std::size_t max_iter) {
    require_start_vector(map, u, "radius_bracket");
    if (!u.strictly_positive()) {
        throw DegenerateBoundError("radius_bracket: start vector must be strictly positive");
    }
    const ConeSpace& space = map.space();
    const double kappa = cw_rounding_allowance(space.dimension());
    const ConeVector u_hat = (1.0 / space.norm(u)) * u;
    static constexpr double kTruncation[] = {1e-12, 1e-6};

    SpectralEstimate est;
    est.cw_upper = kInf;
    ConeVector y = u_hat;

    auto offer_lower = [&](double value, const ConeVector& witness) {
        if (value >= est.cw_lower) {
            est.cw_lower = value;
            est.lower_witness = witness;
        }
    };

    for (std::size_t k = 1; k <= max_iter; ++k) {
        est.iterations = k;
        const ConeVector z = evaluate(map, y);
        const double nz = space.norm(z);
        if (nz == 0.0) {
            // y is a positive multiple of B^{k-1}-images of u, so B^k u = 0 and
            // ||B^k u||_u = 0 bounds r_+ by zero.
            est.cw_lower = 0.0;
            est.cw_upper = 0.0;
            est.upper_witness = u_hat;
            if (est.lower_witness.size() == 0) est.lower_witness = u_hat;
            est.value = 0.0;
            est.lower_trace.push_back(0.0);
            est.upper_trace.push_back(0.0);
            est.converged = true;
            return est;
        }
        est.log_norm_trace.push_back(std::log(nz));

        double lower_k = lower_ratio(z, y) * (1.0 - kappa);
        offer_lower(lower_k, y);
        for (double threshold : kTruncation) {
            bool changed = false;
            const ConeVector yt = truncated(y, threshold, changed);
            if (!changed) continue;
            const double candidate = lower_ratio(evaluate(map, yt), yt) * (1.0 - kappa);
            offer_lower(candidate, yt);
            lower_k = std::max(lower_k, candidate);
        }

        const ConeVector w = axpy(y, support_weight(k), u_hat);
        const double upper_k = u_norm(evaluate(map, w), w) * (1.0 + kappa);
        if (upper_k <= est.cw_upper) {
            est.cw_upper = upper_k;
            est.upper_witness = w;
        }
        est.lower_trace.push_back(lower_k);
        est.upper_trace.push_back(upper_k);

        if (est.cw_upper - est.cw_lower <= tol * std::max(1.0, est.cw_lower)) {
            est.converged = true;
            break;
        }

        // Averaged step: fixed points are exactly the eigenvectors of B.
        ConeVector next = axpy(y, 1.0 / nz, z);
        y = (1.0 / space.norm(next)) * next;
    }

    est.value = std::isinf(est.cw_upper) ? est.cw_lower : 0.5 * (est.cw_lower + est.cw_upper);
    return est;
}

ResolventResult resolvent_apply(const HomogeneousMap& map, double lambda, const ConeVector& x, double trunc_tol,
                                std::size_t max_terms) {
    const ConeVector ones = ConeVector::constant(map.dimension(), 1.0);
    SpectralEstimate quick = radius_bracket(map, ones, 1e-12, 50);
    if (lambda > quick.cw_lower && lambda <= quick.cw_upper) {
        quick = radius_bracket(map, ones, 1e-12, 10000);
    }
    return resolvent_apply(map, lambda, x, trunc_tol, max_terms, quick);
}

ResolventResult resolvent_apply(const HomogeneousMap& map, double lambda, const ConeVector& x, double trunc_tol,
                                std::size_t max_terms, const SpectralEstimate& certificate) {
    const ConeSpace& space = map.space();
    space.check_dimension(x);
    if (!x.in_cone()) throw MapContractError("resolvent_apply: x is not in the cone");
    if (!(trunc_tol > 0.0)) throw MapContractError("resolvent_apply: trunc_tol must be positive");
    if (!std::isfinite(lambda) || lambda <= certificate.cw_lower) {
        throw SpectralDomainError("resolvent_apply: lambda = " + std::to_string(lambda) +
                                  " does not exceed the lower bound " + std::to_string(certificate.cw_lower) +
                                  " of the spectral radius");
    }
    if (lambda <= certificate.cw_upper) {
        throw SpectralDomainError("resolvent_apply: lambda = " + std::to_string(lambda) +
                                  " is not above the certified upper bound " +
                                  std::to_string(certificate.cw_upper) + " of the spectral radius");
    }

    const double q = certificate.cw_upper / lambda;
    const ConeVector& w = certificate.upper_witness;
    const double w_norm = space.norm(w);
    const double lambda_scale = std::max(1.0, lambda);

    ResolventResult result;
    ConeVector term = (1.0 / lambda) * x;
    ConeVector sum = term;
    for (std::size_t n = 0;; ++n) {
        result.terms = n + 1;
        result.last_term_norm = space.norm(term);
        if (term.is_zero()) {
            result.tail_bound = 0.0;
            break;
        }
        result.tail_bound = u_norm(term, w) * w_norm * q / (1.0 - q);
        if (result.last_term_norm < trunc_tol && lambda_scale * result.tail_bound < trunc_tol) break;
        if (result.terms >= max_terms) {
            throw TruncationError("resolvent_apply: " + std::to_string(max_terms) +
                                      " terms did not reach the truncation tolerance",
                                  sum, result.terms);
        }
        term = (1.0 / lambda) * evaluate(map, term);
        sum = sum + term;
    }
    result.value = std::move(sum);
    return result;
}

} // namespace conerad
