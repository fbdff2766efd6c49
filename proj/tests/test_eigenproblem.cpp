#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "conerad/eigenproblem.hpp"
#include "conerad/twosex.hpp"
#include "support.hpp"

using namespace conerad;

namespace {

HomogeneousMap diag21() { return HomogeneousMap::linear(Matrix::from_rows({{2, 0}, {0, 1}})); }
const ConeVector kOnes2{1, 1};

double max_violation(const HomogeneousMap& map, const ConeVector& x, double r) {
    const ConeVector bx = evaluate(map, x);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, r * x[i] - bx[i]);
    return worst;
}

} // namespace

TEST_CASE("perturbation solver examples") {
    const auto d = solve_eigenvector_perturbation(diag21(), kOnes2, default_eps_schedule(), 1e-13, 1000000);
    CHECK(d.lambda == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(d.vector[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(d.vector[1] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(d.lambda_raw >= d.lambda);
    for (std::size_t k = 1; k < d.trace.size(); ++k) CHECK(d.trace[k].lambda <= d.trace[k - 1].lambda * (1 + 1e-12));

    const HomogeneousMap three = HomogeneousMap::linear(3.0 * Matrix::identity(3));
    const auto c = solve_eigenvector_perturbation(three, ConeVector::constant(3, 1.0), default_eps_schedule(), 1e-13,
                                                  1000000);
    CHECK(c.lambda == doctest::Approx(3.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i) CHECK(c.vector[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const auto model = twosex::build_model(testing::symmetric_two_patch());
    const auto t = solve_eigenvector_perturbation(model.as_map(), model.order_bound(), default_eps_schedule(), 1e-13,
                                                  1000000);
    CHECK(t.lambda == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(t.vector[0] == doctest::Approx(t.vector[1]).epsilon(1e-12));
}

TEST_CASE("perturbation solver errors") {
    CHECK_THROWS_AS(solve_eigenvector_perturbation(diag21(), ConeVector{1, 0}, default_eps_schedule(), 1e-12, 1000),
                    DegenerateBoundError);
    // A slowly mixing matrix cannot converge in two inner steps.
    const HomogeneousMap slow = HomogeneousMap::linear(Matrix::from_rows({{1, 1e-3}, {2e-3, 1}}));
    try {
        solve_eigenvector_perturbation(slow, kOnes2, default_eps_schedule(), 1e-15, 2);
        FAIL("expected InnerIterationError");
    } catch (const InnerIterationError& e) {
        CHECK_FALSE(e.trace().empty());
    }
}

TEST_CASE("perturbation solver agrees with the bracket") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 3 + t % 6;
        const Matrix a = testing::random_primitive(rng, n, 0.6);
        const HomogeneousMap map = HomogeneousMap::linear(a);
        const ConeVector u = ConeVector::constant(n, 1.0);
        const auto r = solve_eigenvector_perturbation(map, u, default_eps_schedule(1, 12), 1e-14, 10000000);
        const auto b = radius_bracket(map, u, 1e-10);
        CHECK(r.lambda == doctest::Approx(b.value).epsilon(1e-7));
        CHECK(r.trace.back().lambda >= b.cw_lower);
        CHECK(r.residual <= 1e-8 * map.space().norm(r.vector));
        CHECK(psi_hull(map.space(), r.vector) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("min-iteration examples") {
    const auto d = solve_subeigenvector_min(diag21(), kOnes2, 2.0);
    CHECK(d.mode == EigenMode::SubEigen);
    CHECK(d.vector[0] > 0.0);
    CHECK(d.vector[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(max_violation(diag21(), d.vector, 2.0) <= 1e-12);

    CHECK_THROWS_AS(solve_subeigenvector_min(diag21(), kOnes2, 4.0), ZeroLimitError);

    const HomogeneousMap id = HomogeneousMap::linear(Matrix::identity(2));
    const auto i = solve_subeigenvector_min(id, kOnes2, 1.0);
    CHECK(i.vector[0] == doctest::Approx(0.5));
    CHECK(i.vector[1] == doctest::Approx(0.5));
}

TEST_CASE("min-iteration certificates on random maps") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 2 + t % 7;
        const HomogeneousMap map = t % 2 ? HomogeneousMap::linear(testing::random_primitive(rng, n, 0.5))
                                         : min_linear_map({testing::random_primitive(rng, n, 0.9),
                                                           testing::random_primitive(rng, n, 0.9)},
                                                          ConeSpace::l1(n));
        const ConeVector u = ConeVector::constant(n, 1.0);
        const auto b = radius_bracket(map, u, 1e-10);
        const auto x = solve_subeigenvector_min(map, u, b.cw_lower);
        CHECK_FALSE(x.vector.is_zero());
        CHECK(max_violation(map, x.vector, b.cw_lower - 1e-8) <= 0.0);
        CHECK_THROWS_AS(solve_subeigenvector_min(map, u, 2.0 * b.cw_upper), ZeroLimitError);
    }
}

TEST_CASE("automatic sub-eigenvector and refinement") {
    const auto model = twosex::build_model(testing::symmetric_two_patch());
    const HomogeneousMap map = model.as_map();
    const ConeVector u = model.order_bound();
    const auto sub = solve_subeigenvector_min(map, u, 0.25);
    const auto ref = refine_eigenvector_monotone(map, sub.vector, u, 0.25);
    CHECK(ref.mode == EigenMode::Exact);
    CHECK(ref.residual <= 1e-10);
    CHECK(ref.vector[0] == doctest::Approx(ref.vector[1]).epsilon(1e-12));

    const auto e1 = refine_eigenvector_monotone(diag21(), ConeVector{1, 0}, kOnes2, 2.0);
    CHECK(e1.residual == 0.0);
    CHECK(e1.vector == ConeVector{1, 0});

    const HomogeneousMap id = HomogeneousMap::linear(Matrix::identity(3));
    const ConeVector x0{0.2, 0.5, 0.3};
    const auto same = refine_eigenvector_monotone(id, x0, ConeVector::constant(3, 1.0), 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(same.vector[i] == doctest::Approx(x0[i]).epsilon(1e-15));

    std::mt19937_64 rng(45);
    const Matrix a = testing::random_primitive(rng, 6, 0.6);
    const HomogeneousMap lin = HomogeneousMap::linear(a);
    const auto b = radius_bracket(lin, ConeVector::constant(6, 1.0), 1e-12);
    const auto s = solve_subeigenvector_auto(lin, ConeVector::constant(6, 1.0), b);
    CHECK(s.lambda >= b.cw_lower);
    CHECK(max_violation(lin, s.vector, s.lambda) <= 1e-12);
}

TEST_CASE("refinement rejects bad inputs") {
    // x0 = (1,1) is not a sub-eigenvector of diag(2,1) at r = 2: the orbit decreases.
    CHECK_THROWS_AS(refine_eigenvector_monotone(diag21(), kOnes2, kOnes2, 2.0), MapContractError);
    // r_est below the radius: the orbit escapes every multiple of u.
    CHECK_THROWS_AS(refine_eigenvector_monotone(diag21(), ConeVector{1, 0}, kOnes2, 1.0, 1e-12, 100000), ScaleError);
}

TEST_CASE("eigenfunctional examples") {
    const auto b = radius_bracket(diag21(), kOnes2, 1e-12);
    const auto phi = estimate_eigenfunctional(diag21(), kOnes2, kOnes2, default_lambda_schedule(b.cw_upper, 6), 1e-14);
    CHECK(phi.phi_of_u > 0.0);
    CHECK(phi.relative_defect <= 1e-3);
    // phi is nearly proportional to x_1.
    CHECK(phi.evaluator(ConeVector{0, 1}) <= 1e-4 * phi.evaluator(ConeVector{1, 0}));

    const HomogeneousMap id = HomogeneousMap::linear(Matrix::identity(3));
    const ConeVector u = ConeVector::constant(3, 1.0);
    const ConeVector xstar{1, 2, 3};
    const auto e = estimate_eigenfunctional(id, u, xstar, default_lambda_schedule(1.0 + 1e-9, 3), 1e-14);
    const ConeVector x{0.4, 0.1, 0.7};
    CHECK(e.evaluator(evaluate(id, x)) == doctest::Approx(e.evaluator(x)).epsilon(1e-12));
    CHECK(e.evaluator(x) == doctest::Approx(dot(xstar, x) / 3.0).epsilon(1e-9));

    CHECK_THROWS_AS(estimate_eigenfunctional(diag21(), kOnes2, kOnes2, {3.0, 1.5}, 1e-12), SpectralDomainError);
    CHECK_THROWS_AS(estimate_eigenfunctional(diag21(), kOnes2, kOnes2, {3.0, 4.0}, 1e-12), SpectralDomainError);
}

TEST_CASE("eigenfunctionals are homogeneous and order preserving") {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 4; ++t) {
        const std::size_t n = 3 + t;
        const HomogeneousMap map = t % 2 ? HomogeneousMap::linear(testing::random_primitive(rng, n, 0.7))
                                         : min_linear_map({testing::random_primitive(rng, n, 0.9),
                                                           testing::random_primitive(rng, n, 0.9)},
                                                          ConeSpace::l1(n));
        const ConeVector u = ConeVector::constant(n, 1.0);
        const auto b = radius_bracket(map, u, 1e-10);
        const auto phi = estimate_eigenfunctional(map, u, u, default_lambda_schedule(b.cw_upper, 3), 1e-12, 64, 20);
        CHECK(phi.phi_of_u > 0.0);
        std::uniform_real_distribution<double> alpha(0.1, 10.0);
        for (int s = 0; s < 10; ++s) {
            const ConeVector x = testing::random_cone(rng, n);
            const ConeVector y = x + testing::random_cone(rng, n, 0.3);
            const double a = alpha(rng);
            const double px = phi.evaluator(x);
            CHECK(std::abs(phi.evaluator(a * x) - a * px) <= 1e-9 * a * px);
            CHECK(px <= phi.evaluator(y) + 1e-9);
        }
    }
}

TEST_CASE("reduce_power_functional") {
    const Functional first = [](const ConeVector& x) { return x[0]; };
    const HomogeneousMap swap = HomogeneousMap::linear(Matrix::from_rows({{0, 1}, {1, 0}}));
    const ConeVector x{0.3, 1.1};
    CHECK(reduce_power_functional(first, swap, 1.0, 1)(x) == 0.3);
    const Functional phi = reduce_power_functional(first, swap, 1.0, 2);
    CHECK(phi(x) == doctest::Approx(1.4));
    CHECK(phi(evaluate(swap, x)) == doctest::Approx(phi(x)));
    const Functional d = reduce_power_functional(first, diag21(), 2.0, 2);
    CHECK(d(x) == doctest::Approx(0.6));
    CHECK(d(evaluate(diag21(), x)) == doctest::Approx(2.0 * d(x)));
}

TEST_CASE("zero map") {
    const HomogeneousMap zero = HomogeneousMap::linear(Matrix(2, 2));
    const auto r = solve_eigenvector_perturbation(zero, kOnes2, default_eps_schedule(), 1e-12, 1000);
    CHECK(r.lambda == 0.0);
    CHECK(r.mode == EigenMode::SubEigen);
    CHECK(r.vector[0] == doctest::Approx(0.5));
}
