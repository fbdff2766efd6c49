#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "conerad/homog_map.hpp"
#include "conerad/twosex.hpp"
#include "support.hpp"

using namespace conerad;

namespace {

HomogeneousMap diag21() { return HomogeneousMap::linear(Matrix::from_rows({{2, 0}, {0, 1}})); }
HomogeneousMap swap2() { return HomogeneousMap::linear(Matrix::from_rows({{0, 1}, {1, 0}})); }

} // namespace

TEST_CASE("evaluate") {
    CHECK(evaluate(diag21(), ConeVector{1, 1}) == ConeVector{2, 1});
    CHECK(evaluate(diag21(), ConeVector::zeros(2)).is_zero());
    const auto model = twosex::build_model(testing::gaussian_1d(8, 0.2, 3.0));
    CHECK(evaluate(model.as_map(), ConeVector::zeros(8)).is_zero());
    CHECK_THROWS_AS(evaluate(diag21(), ConeVector{-1, 1}), MapContractError);
    CHECK_THROWS_AS(evaluate(diag21(), ConeVector{1, 1, 1}), DimensionError);
}

TEST_CASE("evaluate rejects outputs outside the cone") {
    const HomogeneousMap bad(ConeSpace::l1(2), [](const ConeVector& x) { return std::vector<double>{-x[0], x[1]}; });
    CHECK_THROWS_AS(evaluate(bad, ConeVector{1, 1}), MapContractError);
    const HomogeneousMap short_out(ConeSpace::l1(2), [](const ConeVector& x) { return std::vector<double>{x[0]}; });
    CHECK_THROWS_AS(evaluate(short_out, ConeVector{1, 1}), MapContractError);
    CHECK_THROWS_AS(HomogeneousMap::linear(Matrix::from_rows({{1, -1}, {0, 1}})), MapContractError);
}

TEST_CASE("linear maps agree with their matrix") {
    std::mt19937_64 rng(2);
    const Matrix a = testing::random_matrix(rng, 7, 0.6);
    const HomogeneousMap map = HomogeneousMap::linear(a);
    for (int t = 0; t < 20; ++t) {
        const ConeVector x = testing::random_cone(rng, 7);
        const ConeVector y = evaluate(map, x);
        const std::vector<double> ref = a.apply(x.entries());
        for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(y[i] - ref[i]) <= 1e-12 * std::max(1.0, ref[i]));
    }
}

TEST_CASE("power_apply") {
    CHECK(power_apply(diag21(), ConeVector{1, 1}, 3) == ConeVector{8, 1});
    CHECK(power_apply(diag21(), ConeVector{1, 1}, 0) == ConeVector{1, 1});
    CHECK(power_apply(swap2(), ConeVector{1, 2}, 2) == ConeVector{1, 2});
    CHECK(evaluate(power_map(diag21(), 3), ConeVector{1, 1}) == ConeVector{8, 1});
    CHECK(evaluate(compose(diag21(), swap2()), ConeVector{1, 3}) == ConeVector{6, 1});
}

TEST_CASE("perturb") {
    const HomogeneousMap zero = HomogeneousMap::linear(Matrix(2, 2));
    const ConeSpace l1 = ConeSpace::l1(2);
    CHECK(evaluate(perturb(zero, 1.0, ConeVector{1, 0}, l1), ConeVector{2, 0}) == ConeVector{2, 0});
    const HomogeneousMap id = HomogeneousMap::linear(Matrix::identity(2));
    CHECK(evaluate(perturb(id, 0.5, ConeVector{1, 1}, l1), ConeVector{1, 1}) == ConeVector{2, 2});

    std::mt19937_64 rng(4);
    const HomogeneousMap nl = min_linear_map({testing::random_matrix(rng, 4, 0.8), testing::random_matrix(rng, 4, 0.8)},
                                             ConeSpace::l1(4));
    const ConeVector u = testing::random_cone(rng, 4);
    for (const HomogeneousMap& m : {nl, HomogeneousMap::linear(testing::random_matrix(rng, 4, 0.7))}) {
        const HomogeneousMap p = perturb(m, 0.3, u, ConeSpace::l1(4));
        for (int t = 0; t < 20; ++t) {
            const ConeVector x = testing::random_cone(rng, 4);
            const ConeVector diff = evaluate(p, x) - evaluate(m, x);
            const ConeVector want = (0.3 * psi_hull(ConeSpace::l1(4), x)) * u;
            for (std::size_t i = 0; i < 4; ++i) CHECK(diff[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
        CHECK(verify_properties(p, 200, 1e-10).ok());
        CHECK(p.flags().strictly_increasing);
    }
}

TEST_CASE("perturbed maps are strictly increasing") {
    // For x <= y with psi(x) < psi(y): B~(y) >= (1 + eta) B~(x) with
    // eta = d / ((c + eps) ||x||), d = eps (psi(y) - psi(x)), B(x) <= c ||x|| u.
    std::mt19937_64 rng(6);
    const std::size_t n = 4;
    const ConeSpace s = ConeSpace::l1(n);
    const Matrix a = testing::random_matrix(rng, n, 0.7);
    const HomogeneousMap b = HomogeneousMap::linear(a, s);
    const ConeVector u = testing::random_cone(rng, n) + ConeVector::constant(n, 0.1);
    const double eps = 0.2;
    const HomogeneousMap p = perturb(b, eps, u, s);
    // B(x) <= c ||x|| u with c = max_ij a_ij / u_i.
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) c = std::max(c, a(i, j) / u[i]);
    }
    for (int t = 0; t < 100; ++t) {
        const ConeVector x = testing::random_cone(rng, n);
        const ConeVector y = x + testing::random_cone(rng, n, 0.5);
        const double gap = psi_hull(s, y) - psi_hull(s, x);
        if (!(gap > 0.0)) continue;
        const double d = eps * gap;
        const double eta = d / ((c + eps) * s.norm(x));
        const ConeVector px = evaluate(p, x);
        const ConeVector py = evaluate(p, y);
        for (std::size_t i = 0; i < n; ++i) CHECK(py[i] >= (1.0 + eta) * px[i] * (1.0 - 1e-12));
    }
}

TEST_CASE("op_norm_plus") {
    const auto est = op_norm_plus(HomogeneousMap::linear(Matrix::from_rows({{1, 2}, {3, 0}})), 0);
    CHECK(est.exact);
    CHECK(est.value == 4.0);
    for (const ConeSpace& s : {ConeSpace::l1(3), ConeSpace::linf(3), ConeSpace(3, std::vector<double>{1, 2, 3})}) {
        CHECK(op_norm_plus(HomogeneousMap::linear(Matrix::identity(3), s), 0).value == doctest::Approx(1.0));
        CHECK(op_norm_plus(HomogeneousMap::linear(2.0 * Matrix::identity(3), s), 0).value == doctest::Approx(2.0));
    }
    std::mt19937_64 rng(8);
    const HomogeneousMap nl = min_linear_map({testing::random_matrix(rng, 3, 1.0), testing::random_matrix(rng, 3, 1.0)},
                                             ConeSpace::l1(3));
    const auto sampled = op_norm_plus(nl, 64, 99);
    CHECK_FALSE(sampled.exact);
    std::mt19937_64 again(99);
    for (std::size_t t = 0; t < 64; ++t) {
        const ConeVector x = random_unit_cone_vector(nl.space(), again);
        CHECK(sampled.value >= nl.space().norm(evaluate(nl, x)) * (1 - 1e-15));
    }
}

TEST_CASE("operator norm is submultiplicative for linear maps") {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 30; ++t) {
        const HomogeneousMap b = HomogeneousMap::linear(testing::random_matrix(rng, 5, 0.6));
        const HomogeneousMap c = HomogeneousMap::linear(testing::random_matrix(rng, 5, 0.6));
        const double cb = op_norm_plus(compose(c, b), 0).value;
        CHECK(cb <= op_norm_plus(c, 0).value * op_norm_plus(b, 0).value * (1 + 1e-12) + 1e-300);
    }
}

TEST_CASE("verify_properties") {
    CHECK(verify_properties(diag21(), 500, 1e-12).ok());
    const HomogeneousMap quad(ConeSpace::l1(2),
                              [](const ConeVector& x) { return std::vector<double>{x[0] * x[0], x[1]}; });
    const PropertyReport r = verify_properties(quad, 200, 1e-9);
    CHECK(r.homogeneity_violations > 0);
    CHECK_FALSE(r.examples.empty());

    const auto model = twosex::build_model(testing::gaussian_1d(12, 0.15, 4.0));
    const PropertyReport t = verify_properties(model.as_map(), 500, 1e-9);
    CHECK(t.ok());

    // Decreasing map: order preservation fails.
    const HomogeneousMap flip(ConeSpace::l1(2), [](const ConeVector& x) {
        return std::vector<double>{std::max(0.0, 2 * x[1] - x[0]), x[1]};
    });
    CHECK(verify_properties(flip, 200, 1e-9).monotonicity_violations > 0);

    // max of linear maps is not superadditive, but does not claim to be.
    std::mt19937_64 rng(12);
    const HomogeneousMap mx = max_linear_map({testing::random_matrix(rng, 3, 1), testing::random_matrix(rng, 3, 1)},
                                             ConeSpace::l1(3));
    CHECK(verify_properties(mx, 200, 1e-10).ok());
    // A map that wrongly claims superadditivity is caught.
    MapFlags claim;
    claim.superadditive = true;
    const HomogeneousMap liar(ConeSpace::l1(2), [](const ConeVector& x) {
        return std::vector<double>{std::max(x[0], x[1]), std::max(x[0], x[1])};
    }, claim);
    CHECK(verify_properties(liar, 200, 1e-10).superadditivity_violations > 0);
}

TEST_CASE("random unit cone vectors are reproducible and normalized") {
    const ConeSpace s(4, std::vector<double>{1, 2, 3, 4});
    std::mt19937_64 a(5);
    std::mt19937_64 b(5);
    for (int t = 0; t < 10; ++t) {
        const ConeVector x = random_unit_cone_vector(s, a);
        CHECK(x == random_unit_cone_vector(s, b));
        CHECK(x.in_cone());
        CHECK(s.norm(x) == doctest::Approx(1.0).epsilon(1e-14));
    }
}
