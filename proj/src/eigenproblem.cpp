#include "conerad/eigenproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace conerad {

namespace {

constexpr std::size_t kMaxResolventTerms = 200'000'000;

double psi_of(const ConeSpace& space, const ConeVector& x) { return psi_hull(space, x); }

ConeVector psi_normalized(const ConeSpace& space, const ConeVector& x) {
    const double p = psi_of(space, x);
    return (1.0 / p) * x;
}

double subeigen_defect(const ConeVector& bv, double lambda, const ConeVector& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) d = std::max(d, lambda * v[i] - bv[i]);
    return d;
}

double max_abs(const ConeVector& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

double u_or_one(double ui) { return ui > 0.0 ? ui : 1.0; }

void fill_residuals(const HomogeneousMap& map, EigenResult& result) {
    const ConeVector bv = evaluate(map, result.vector);
    result.residual = map.space().norm(bv - result.lambda * result.vector);
    result.subeigen_defect = subeigen_defect(bv, result.lambda, result.vector);
}

} // namespace

std::vector<double> default_eps_schedule(int first, int last) {
    std::vector<double> eps;
    for (int n = first; n <= last; ++n) eps.push_back(std::pow(10.0, -n));
    return eps;
}

std::vector<double> default_lambda_schedule(double r_upper, int count) {
    std::vector<double> out;
    for (int n = 1; n <= count; ++n) out.push_back(r_upper * (1.0 + std::pow(10.0, -n)));
    return out;
}

EigenResult solve_eigenvector_perturbation(const HomogeneousMap& map, const ConeVector& u,
                                           const std::vector<double>& eps_schedule, double inner_tol,
                                           std::size_t max_inner) {
    const ConeSpace& space = map.space();
    space.check_dimension(u);
    if (!u.strictly_positive()) {
        throw DegenerateBoundError("solve_eigenvector_perturbation: u must be strictly positive");
    }
    if (eps_schedule.empty()) throw MapContractError("solve_eigenvector_perturbation: empty eps schedule");
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
        if (!(eps_schedule[i] > 0.0) || (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))) {
            throw MapContractError("solve_eigenvector_perturbation: eps schedule must be positive and decreasing");
        }
    }

    EigenResult result;
    ConeVector v = psi_normalized(space, u);
    double lambda_prev = std::numeric_limits<double>::infinity();
    double lambda_eps = 0.0;

    for (double eps : eps_schedule) {
        const HomogeneousMap perturbed = perturb(map, eps, u, space);
        bool done = false;
        std::size_t it = 0;
        while (it < max_inner) {
            ++it;
            const ConeVector z = evaluate(perturbed, v);
            lambda_eps = psi_of(space, z);
            ConeVector next = (1.0 / lambda_eps) * z;
            const double diff = space.norm(next - v);
            v = std::move(next);
            if (diff < inner_tol) {
                done = true;
                break;
            }
        }
        result.iterations += it;
        const ConeVector bz = evaluate(perturbed, v);
        result.trace.push_back({eps, lambda_eps, space.norm(bz - lambda_eps * v), it});
        if (!done) {
            throw InnerIterationError("solve_eigenvector_perturbation: inner iteration for eps = " +
                                          std::to_string(eps) + " did not converge in " +
                                          std::to_string(max_inner) + " steps",
                                      result.trace);
        }
        // r_+(B_eps) decreases with eps because B_eps dominates B_eps' pointwise.
        const double slack = 10.0 * inner_tol * std::max(1.0, lambda_eps) + 1e-12 * lambda_eps;
        if (lambda_eps > lambda_prev + slack) {
            throw MapContractError("solve_eigenvector_perturbation: lambda_eps increased from " +
                                   std::to_string(lambda_prev) + " to " + std::to_string(lambda_eps) +
                                   "; the map is not order preserving");
        }
        lambda_prev = lambda_eps;
    }

    result.lambda_raw = lambda_eps;
    result.vector = v;
    const ConeVector bv = evaluate(map, v);
    result.lambda = psi_of(space, bv);
    if (result.lambda == 0.0) {
        // B kills the computed direction; no positive eigenvector guarantee at r_+ = 0.
        result.vector = psi_normalized(space, u);
        result.lambda = 0.0;
        result.mode = EigenMode::SubEigen;
        fill_residuals(map, result);
        return result;
    }
    fill_residuals(map, result);
    const double exact_tol = 100.0 * inner_tol * std::max(1.0, result.lambda) +
                             10.0 * eps_schedule.back() * space.norm(u);
    result.mode = result.residual <= exact_tol ? EigenMode::Exact : EigenMode::SubEigen;
    result.converged = true;
    return result;
}

EigenResult solve_subeigenvector_min(const HomogeneousMap& map, const ConeVector& u, double r_est, std::size_t k_max,
                                     double tol) {
    const ConeSpace& space = map.space();
    space.check_dimension(u);
    if (!u.in_cone() || u.is_zero()) throw DegenerateBoundError("solve_subeigenvector_min: u must be nonzero");
    if (!(r_est > 0.0) || !std::isfinite(r_est)) {
        throw MapContractError("solve_subeigenvector_min: r_est must be positive and finite");
    }
    if (std::isinf(u_norm(evaluate(map, u), u))) {
        throw DegenerateBoundError("solve_subeigenvector_min: B(u) is not u-bounded");
    }

    // Every u-bounded x with B(x) >= r_est x, scaled to ||x||_u = 1, stays
    // below all x_k. So ||x_k||_u < 1 proves no such x exists: r_est > r_+(B),
    // and the sequence can only decrease to zero.
    constexpr double kUnitSlack = 1e-9;

    EigenResult result;
    result.mode = EigenMode::SubEigen;
    result.lambda = r_est;
    result.lambda_raw = r_est;
    ConeVector x = u;
    const double inv_r = 1.0 / r_est;
    bool converged = false;

    std::size_t k = 1;
    for (; k <= k_max; ++k) {
        const double sigma = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 1000)));
        const ConeVector y = axpy(inv_r * evaluate(map, x), sigma, u);
        ConeVector next = meet(y, u);
        // Decrease check, with slack for rounding in B.
        double increase = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) increase = std::max(increase, (next[i] - x[i]) / u_or_one(u[i]));
        if (increase > 1e-10) {
            throw MapContractError("solve_subeigenvector_min: sequence increased by " + std::to_string(increase) +
                                   " (relative to u) at k = " + std::to_string(k) + "; map is not order preserving");
        }
        next = meet(next, x);
        const double step = u_norm(x - next, u);
        x = std::move(next);
        const double size = u_norm(x, u);
        if (k % 64 == 0 || size < 1.0 - kUnitSlack) {
            result.trace.push_back({static_cast<double>(k), r_est, size, k});
        }
        if (size < 1.0 - kUnitSlack) {
            throw ZeroLimitError("solve_subeigenvector_min: min-iteration collapses to zero (||x_k||_u = " +
                                 std::to_string(size) + " at k = " + std::to_string(k) + "); r_est = " +
                                 std::to_string(r_est) + " exceeds the cone spectral radius");
        }
        if (step <= tol && sigma <= tol) {
            converged = true;
            break;
        }
    }
    result.iterations = std::min(k, k_max);
    result.converged = converged;
    result.vector = psi_normalized(space, x);
    fill_residuals(map, result);
    return result;
}

EigenResult solve_subeigenvector_auto(const HomogeneousMap& map, const ConeVector& u, const SpectralEstimate& bracket,
                                      std::size_t max_bisections) {
    if (!(bracket.cw_lower > 0.0)) {
        throw DegenerateBoundError("solve_subeigenvector_auto: lower radius bound is zero");
    }
    double r = std::isfinite(bracket.value) && bracket.value > bracket.cw_lower ? bracket.value : bracket.cw_lower;
    for (std::size_t i = 0;; ++i) {
        try {
            return solve_subeigenvector_min(map, u, r);
        } catch (const ZeroLimitError&) {
            if (i >= max_bisections || r <= bracket.cw_lower) throw;
            r = 0.5 * (r + bracket.cw_lower);
            if (i + 1 == max_bisections) r = bracket.cw_lower;
        }
    }
}

EigenResult refine_eigenvector_monotone(const HomogeneousMap& map, const ConeVector& x0, const ConeVector& u,
                                        double r_est, double tol, std::size_t max_iter) {
    const ConeSpace& space = map.space();
    space.check_dimension(x0);
    space.check_dimension(u);
    if (!x0.in_cone() || x0.is_zero()) throw DegenerateBoundError("refine_eigenvector_monotone: x0 must be nonzero");
    if (!(r_est > 0.0)) throw MapContractError("refine_eigenvector_monotone: r_est must be positive");
    const double c0 = u_norm(x0, u);
    if (std::isinf(c0)) throw DegenerateBoundError("refine_eigenvector_monotone: x0 is not u-bounded");

    constexpr double kDivergence = 1e8;
    ConeVector x = psi_normalized(space, x0);
    const double bound0 = u_norm(x, u);
    EigenResult result;
    result.lambda = r_est;
    result.lambda_raw = r_est;
    bool converged = false;
    std::size_t n = 1;
    for (; n <= max_iter; ++n) {
        ConeVector next = (1.0 / r_est) * evaluate(map, x);
        const double slack = 10.0 * tol + 1e-12 * max_abs(x);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (next[i] < x[i] - slack) {
                throw MapContractError("refine_eigenvector_monotone: orbit decreased at entry " + std::to_string(i) +
                                       " (step " + std::to_string(n) + "); x0 is not a sub-eigenvector");
            }
        }
        const double bound = u_norm(next, u);
        if (bound > kDivergence * bound0) {
            throw ScaleError("refine_eigenvector_monotone: orbit grew beyond " + std::to_string(kDivergence) +
                             " times its initial u-norm; r_est underestimates the spectral radius");
        }
        const double diff = space.norm(next - x);
        x = std::move(next);
        if (n % 64 == 0) result.trace.push_back({static_cast<double>(n), r_est, diff, n});
        if (diff <= tol) {
            converged = true;
            break;
        }
    }
    result.iterations = std::min(n, max_iter);
    result.converged = converged;
    result.vector = psi_normalized(space, x);
    result.mode = converged ? EigenMode::Exact : EigenMode::SubEigen;
    fill_residuals(map, result);
    return result;
}

EigenfunctionalEstimate estimate_eigenfunctional(const HomogeneousMap& map, const ConeVector& u,
                                                 const ConeVector& xstar, const std::vector<double>& lambda_schedule,
                                                 double trunc_tol, std::size_t samples, std::size_t test_points,
                                                 std::uint64_t seed) {
    const ConeSpace& space = map.space();
    const std::size_t n = space.dimension();
    space.check_dimension(u);
    space.check_dimension(xstar);
    if (!xstar.in_cone() || xstar.is_zero()) {
        throw DegenerateBoundError("estimate_eigenfunctional: probe vector must be a nonzero cone vector");
    }
    if (!u.strictly_positive()) throw DegenerateBoundError("estimate_eigenfunctional: u must be strictly positive");
    if (lambda_schedule.empty()) throw SpectralDomainError("estimate_eigenfunctional: empty lambda schedule");
    for (std::size_t i = 1; i < lambda_schedule.size(); ++i) {
        if (!(lambda_schedule[i] < lambda_schedule[i - 1])) {
            throw SpectralDomainError("estimate_eigenfunctional: lambda schedule must be decreasing");
        }
    }

    const SpectralEstimate bracket = radius_bracket(map, u, 1e-12, 10000);
    for (double lambda : lambda_schedule) {
        if (!(lambda > bracket.cw_upper)) {
            throw SpectralDomainError("estimate_eigenfunctional: lambda = " + std::to_string(lambda) +
                                      " is not above the radius upper bound " + std::to_string(bracket.cw_upper));
        }
    }

    EigenfunctionalEstimate est;
    est.probe_vector = xstar;
    est.lambda_used = lambda_schedule.back();
    est.radius = bracket.value;
    est.seed = seed;

    const double lambda = est.lambda_used;
    auto raw = [map, lambda, trunc_tol, bracket, xstar](const ConeVector& x) {
        return dot(xstar, resolvent_apply(map, lambda, x, trunc_tol, kMaxResolventTerms, bracket).value);
    };

    if (map.matrix()) {
        // x -> x*(R_lambda x) is linear with coefficients g = (lambda I - B^T)^{-1} x*,
        // the sum of the series. Solving directly avoids ~1/(lambda - r) terms.
        const Matrix& b = *map.matrix();
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? lambda : 0.0) - b(j, i);
        }
        std::vector<double> coeff = solve(std::move(m), xstar.data());
        for (double& c : coeff) c = std::max(c, 0.0);
        double sup = 0.0;
        switch (space.norm_kind()) {
        case NormKind::L1:
            sup = *std::max_element(coeff.begin(), coeff.end());
            break;
        case NormKind::Weighted:
            for (std::size_t j = 0; j < n; ++j) sup = std::max(sup, coeff[j] / space.weights()[j]);
            break;
        case NormKind::LInf:
            for (double c : coeff) sup += c;
            break;
        }
        est.normalizer = sup;
        const ConeVector g((1.0 / sup) * ConeVector(coeff));
        est.evaluator = [g](const ConeVector& x) { return dot(g, x); };
    } else {
        double sup = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const ConeVector e = ConeVector::basis(n, j);
            sup = std::max(sup, raw(e) / space.norm(e));
        }
        std::mt19937_64 rng(seed);
        for (std::size_t s = 0; s < samples; ++s) sup = std::max(sup, raw(random_unit_cone_vector(space, rng)));
        est.normalizer = sup;
        est.evaluator = [raw, sup](const ConeVector& x) { return raw(x) / sup; };
    }

    // Defect of phi o B = r phi on u and random cone vectors. Basis vectors are
    // left out: on reducible maps phi(e_j) can vanish and the ratio is meaningless.
    std::vector<ConeVector> points{u};
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t s = 0; s < test_points; ++s) points.push_back(random_unit_cone_vector(space, rng));
    for (const ConeVector& x : points) {
        const double phi_x = est.evaluator(x);
        const double phi_bx = est.evaluator(evaluate(map, x));
        const double defect = std::abs(phi_bx - est.radius * phi_x);
        est.absolute_defect = std::max(est.absolute_defect, defect);
        if (phi_x > 0.0) est.relative_defect = std::max(est.relative_defect, defect / phi_x);
    }
    est.test_points = points.size();
    est.phi_of_u = est.evaluator(u);
    return est;
}

Functional reduce_power_functional(Functional psi_p, const HomogeneousMap& map, double r, std::size_t p) {
    if (p == 0) throw MapContractError("reduce_power_functional: p must be >= 1");
    if (!(r > 0.0)) throw MapContractError("reduce_power_functional: r must be positive");
    return [psi_p = std::move(psi_p), map, r, p](const ConeVector& x) {
        double total = 0.0;
        double weight = 1.0;
        ConeVector y = x;
        for (std::size_t k = 0; k < p; ++k) {
            total += weight * psi_p(y);
            if (k + 1 < p) {
                y = evaluate(map, y);
                weight /= r;
            }
        }
        return total;
    };
}

} // namespace conerad
