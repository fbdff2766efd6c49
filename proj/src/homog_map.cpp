#include "conerad/homog_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace conerad {

namespace {

double max_abs(const ConeVector& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

void require_square_nonnegative(const Matrix& m, const ConeSpace& space, const char* who) {
    if (!m.square() || m.rows() != space.dimension()) {
        throw DimensionError(std::string(who) + ": matrix must be square of size " +
                             std::to_string(space.dimension()));
    }
    if (!m.nonnegative()) {
        throw MapContractError(std::string(who) + ": matrix has negative entries");
    }
}

// psi restricted to the cone is additive exactly for the (weighted) L1 norms.
bool psi_additive_on_cone(const ConeSpace& space) { return space.norm_kind() != NormKind::LInf; }

ConeVector norm_weights(const ConeSpace& space) {
    if (space.norm_kind() == NormKind::Weighted) return ConeVector(space.weights());
    return ConeVector::constant(space.dimension(), 1.0);
}

ConeVector sparsify(ConeVector x, std::mt19937_64& rng) {
    std::bernoulli_distribution drop(0.3);
    std::vector<double> e = x.data();
    for (double& v : e) {
        if (drop(rng)) v = 0.0;
    }
    return ConeVector(std::move(e));
}

} // namespace

HomogeneousMap::HomogeneousMap(ConeSpace space, Evaluator evaluator, MapFlags flags, std::string name) {
    if (flags.linear) {
        throw MapContractError("HomogeneousMap: linear maps must be built with HomogeneousMap::linear");
    }
    if (!evaluator) throw MapContractError("HomogeneousMap: empty evaluator");
    state_ = std::make_shared<const State>(
        State{std::move(space), std::move(evaluator), flags, std::nullopt, std::move(name)});
}

HomogeneousMap HomogeneousMap::linear(Matrix matrix, ConeSpace space) {
    require_square_nonnegative(matrix, space, "HomogeneousMap::linear");
    auto shared = std::make_shared<const Matrix>(matrix);
    Evaluator eval = [shared](const ConeVector& x) { return shared->apply(x.entries()); };
    MapFlags flags;
    flags.linear = true;
    flags.superadditive = true;
    return HomogeneousMap(std::make_shared<const State>(
        State{std::move(space), std::move(eval), flags, std::move(matrix), "linear"}));
}

HomogeneousMap HomogeneousMap::linear(Matrix matrix) {
    const std::size_t n = matrix.rows();
    return linear(std::move(matrix), ConeSpace::l1(n));
}

ConeVector HomogeneousMap::operator()(const ConeVector& x) const { return evaluate(*this, x); }

HomogeneousMap HomogeneousMap::scaled(double alpha) const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw MapContractError("scaled: factor must be finite and nonnegative");
    }
    if (state_->matrix) return linear(alpha * *state_->matrix, state_->space);
    auto inner = state_;
    Evaluator eval = [inner, alpha](const ConeVector& x) {
        auto y = inner->evaluator(x);
        for (double& v : y) v *= alpha;
        return y;
    };
    return HomogeneousMap(state_->space, std::move(eval), state_->flags, state_->name);
}

HomogeneousMap HomogeneousMap::with_space(ConeSpace space) const {
    if (space.dimension() != dimension()) throw DimensionError("with_space: dimension mismatch");
    State copy = *state_;
    copy.space = std::move(space);
    return HomogeneousMap(std::make_shared<const State>(std::move(copy)));
}

ConeVector evaluate(const HomogeneousMap& map, const ConeVector& x) {
    map.space().check_dimension(x);
    if (!x.in_cone()) throw MapContractError(map.name() + ": input is not in the cone");
    if (x.is_zero()) return ConeVector::zeros(x.size());
    std::vector<double> y = map.state_->evaluator(x);
    if (y.size() != x.size()) {
        throw MapContractError(map.name() + ": evaluator returned " + std::to_string(y.size()) +
                               " entries, expected " + std::to_string(x.size()));
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i])) {
            throw MapContractError(map.name() + ": output entry " + std::to_string(i) + " is not finite");
        }
        if (y[i] < 0.0) {
            throw MapContractError(map.name() + ": output entry " + std::to_string(i) +
                                   " is negative (" + std::to_string(y[i]) + ")");
        }
    }
    return ConeVector(std::move(y));
}

ConeVector power_apply(const HomogeneousMap& map, const ConeVector& x, std::size_t n) {
    map.space().check_dimension(x);
    ConeVector y = x;
    for (std::size_t k = 0; k < n; ++k) y = evaluate(map, y);
    return y;
}

HomogeneousMap compose(const HomogeneousMap& outer, const HomogeneousMap& inner) {
    if (outer.dimension() != inner.dimension()) throw DimensionError("compose: dimension mismatch");
    if (outer.matrix() && inner.matrix()) {
        return HomogeneousMap::linear(*outer.matrix() * *inner.matrix(), inner.space());
    }
    MapFlags flags;
    flags.superadditive = outer.flags().superadditive && inner.flags().superadditive;
    Evaluator eval = [outer, inner](const ConeVector& x) { return evaluate(outer, evaluate(inner, x)).data(); };
    return HomogeneousMap(inner.space(), std::move(eval), flags, outer.name() + "*" + inner.name());
}

HomogeneousMap power_map(const HomogeneousMap& map, std::size_t m) {
    if (m == 0) throw MapContractError("power_map: exponent must be >= 1");
    HomogeneousMap result = map;
    for (std::size_t k = 1; k < m; ++k) result = compose(map, result);
    return result;
}

HomogeneousMap perturb(const HomogeneousMap& map, double eps, const ConeVector& u, const ConeSpace& space) {
    space.check_dimension(u);
    if (map.dimension() != space.dimension()) throw DimensionError("perturb: dimension mismatch");
    if (!u.in_cone() || u.is_zero()) throw DegenerateBoundError("perturb: u must be a nonzero cone vector");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw MapContractError("perturb: eps must be positive");

    Evaluator eval = [map, eps, u, space](const ConeVector& x) {
        const double scale = eps * psi_hull(space, x);
        std::vector<double> y = evaluate(map, x).data();
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += scale * u[i];
        return y;
    };

    MapFlags flags;
    flags.strictly_increasing = true;
    flags.superadditive = map.flags().superadditive && psi_additive_on_cone(space);
    if (map.matrix() && psi_additive_on_cone(space)) {
        // psi is the linear functional w.x on the cone, so B + eps u w^T is exact.
        Matrix m = *map.matrix();
        const ConeVector w = norm_weights(space);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += eps * u[i] * w[j];
        HomogeneousMap::State state = *HomogeneousMap::linear(std::move(m), map.space()).state_;
        state.flags.strictly_increasing = true;
        return HomogeneousMap(std::make_shared<const HomogeneousMap::State>(std::move(state)));
    }
    return HomogeneousMap(map.space(), std::move(eval), flags, map.name() + "+eps");
}

HomogeneousMap min_linear_map(const std::vector<Matrix>& matrices, ConeSpace space) {
    if (matrices.empty()) throw MapContractError("min_linear_map: no matrices");
    for (const auto& m : matrices) require_square_nonnegative(m, space, "min_linear_map");
    Evaluator eval = [matrices](const ConeVector& x) {
        std::vector<double> y = matrices.front().apply(x.entries());
        for (std::size_t k = 1; k < matrices.size(); ++k) {
            const std::vector<double> z = matrices[k].apply(x.entries());
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::min(y[i], z[i]);
        }
        return y;
    };
    MapFlags flags;
    flags.superadditive = true;
    return HomogeneousMap(std::move(space), std::move(eval), flags, "min_linear");
}

HomogeneousMap max_linear_map(const std::vector<Matrix>& matrices, ConeSpace space) {
    if (matrices.empty()) throw MapContractError("max_linear_map: no matrices");
    for (const auto& m : matrices) require_square_nonnegative(m, space, "max_linear_map");
    Evaluator eval = [matrices](const ConeVector& x) {
        std::vector<double> y = matrices.front().apply(x.entries());
        for (std::size_t k = 1; k < matrices.size(); ++k) {
            const std::vector<double> z = matrices[k].apply(x.entries());
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::max(y[i], z[i]);
        }
        return y;
    };
    return HomogeneousMap(std::move(space), std::move(eval), MapFlags{}, "max_linear");
}

ConeVector random_unit_cone_vector(const ConeSpace& space, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> e(space.dimension());
    double n = 0.0;
    do {
        for (double& v : e) v = std::abs(normal(rng));
        n = space.norm(ConeVector(e));
    } while (n == 0.0);
    for (double& v : e) v /= n;
    return ConeVector(std::move(e));
}

OperatorNormEstimate op_norm_plus(const HomogeneousMap& map, std::size_t samples, std::uint64_t seed) {
    const ConeSpace& space = map.space();
    const std::size_t n = space.dimension();
    OperatorNormEstimate est;
    est.seed = seed;

    if (map.matrix()) {
        // The unit cone ball is the convex hull of the normalized basis vectors
        // for (weighted) L1, and is the order interval [0, 1] for LInf.
        est.exact = true;
        if (space.norm_kind() == NormKind::LInf) {
            est.value = space.norm(evaluate(map, ConeVector::constant(n, 1.0)));
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                const ConeVector e = ConeVector::basis(n, j);
                est.value = std::max(est.value, space.norm(evaluate(map, e)) / space.norm(e));
            }
        }
        est.sample_count = 0;
        return est;
    }

    for (std::size_t j = 0; j < n; ++j) {
        const ConeVector e = ConeVector::basis(n, j);
        est.value = std::max(est.value, space.norm(evaluate(map, e)) / space.norm(e));
    }
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const ConeVector x = random_unit_cone_vector(space, rng);
        est.value = std::max(est.value, space.norm(evaluate(map, x)));
    }
    est.sample_count = samples + n;
    return est;
}

PropertyReport verify_properties(const HomogeneousMap& map, std::size_t trials, double tol, std::uint64_t seed) {
    PropertyReport report;
    report.trials = trials;
    report.seed = seed;
    report.tol = tol;
    const ConeSpace& space = map.space();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> alpha_dist(0.0, 10.0);
    std::uniform_real_distribution<double> scale_dist(0.1, 10.0);
    std::uniform_real_distribution<double> step_dist(0.0, 2.0);
    std::bernoulli_distribution sparse(0.25);
    constexpr std::size_t kMaxExamples = 10;

    auto record = [&](const char* what, std::size_t trial, double defect) {
        if (report.examples.size() < kMaxExamples) report.examples.push_back({what, trial, defect});
    };
    auto draw = [&] {
        ConeVector x = scale_dist(rng) * random_unit_cone_vector(space, rng);
        return sparse(rng) ? sparsify(std::move(x), rng) : x;
    };

    for (std::size_t t = 0; t < trials; ++t) {
        const ConeVector x = draw();
        const ConeVector d = step_dist(rng) * random_unit_cone_vector(space, rng);
        const ConeVector y = draw();
        const double alpha = alpha_dist(rng);

        const ConeVector bx = evaluate(map, x);

        // Homogeneity.
        const ConeVector lhs = evaluate(map, alpha * x);
        const ConeVector rhs = alpha * bx;
        const double hscale = std::max(max_abs(rhs), std::numeric_limits<double>::min());
        const double hdefect = max_abs(lhs - rhs) / hscale;
        report.max_homogeneity_defect = std::max(report.max_homogeneity_defect, hdefect);
        if (hdefect > tol) {
            ++report.homogeneity_violations;
            record("homogeneity", t, hdefect);
        }

        // Order preservation: B(x) <= B(x + d).
        const ConeVector bxd = evaluate(map, x + d);
        const double mscale = std::max(max_abs(bxd), std::numeric_limits<double>::min());
        double mdefect = 0.0;
        for (std::size_t i = 0; i < bx.size(); ++i) mdefect = std::max(mdefect, bx[i] - bxd[i]);
        mdefect /= mscale;
        report.max_monotonicity_defect = std::max(report.max_monotonicity_defect, mdefect);
        if (mdefect > tol) {
            ++report.monotonicity_violations;
            record("order_preservation", t, mdefect);
        }

        if (map.flags().superadditive) {
            const ConeVector bsum = evaluate(map, x + y);
            const ConeVector parts = bx + evaluate(map, y);
            const double sscale = std::max(max_abs(bsum), std::numeric_limits<double>::min());
            double sdefect = 0.0;
            for (std::size_t i = 0; i < parts.size(); ++i) sdefect = std::max(sdefect, parts[i] - bsum[i]);
            sdefect /= sscale;
            report.max_superadditivity_defect = std::max(report.max_superadditivity_defect, sdefect);
            if (sdefect > tol) {
                ++report.superadditivity_violations;
                record("superadditivity", t, sdefect);
            }
        }
    }
    return report;
}

} // namespace conerad
