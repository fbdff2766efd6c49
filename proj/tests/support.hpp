#pragma once

// Shared helpers for the test binaries: random inputs and reference values
// computed without the library's own solvers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "conerad/cone.hpp"
#include "conerad/matrix.hpp"
#include "conerad/twosex.hpp"

namespace testing {

using conerad::ConeVector;
using conerad::Matrix;

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t n, double density) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (unit(rng) < density) a(i, j) = unit(rng);
        }
    }
    return a;
}

/// Boolean primitivity test: some power of the pattern is all positive.
inline bool primitive_pattern(const Matrix& a) {
    const std::size_t n = a.rows();
    std::vector<char> p(n * n), q(n * n);
    for (std::size_t i = 0; i < n * n; ++i) p[i] = a(i / n, i % n) > 0.0;
    std::vector<char> power = p;
    // Wielandt: A^k > 0 for k = n^2 - 2n + 2 when primitive. Square repeatedly.
    const std::size_t bound = n * n - 2 * n + 2;
    for (std::size_t k = 1; k < 2 * bound + 2; k *= 2) {
        if (std::all_of(power.begin(), power.end(), [](char c) { return c != 0; })) return true;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                char v = 0;
                for (std::size_t l = 0; l < n && !v; ++l) v = power[i * n + l] && power[l * n + j];
                q[i * n + j] = v;
            }
        }
        power.swap(q);
    }
    return std::all_of(power.begin(), power.end(), [](char c) { return c != 0; });
}

inline Matrix random_primitive(std::mt19937_64& rng, std::size_t n, double density) {
    for (;;) {
        Matrix a = random_matrix(rng, n, density);
        if (primitive_pattern(a)) return a;
    }
}

/// Spectral radius from a general dense eigensolver.
inline double eigen_radius(const Matrix& a) {
    const std::size_t n = a.rows();
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline ConeVector random_cone(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> unit(0.0, scale);
    std::vector<double> v(n);
    for (double& x : v) x = unit(rng);
    return ConeVector(std::move(v));
}

inline ConeVector random_signed(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    return ConeVector(std::move(v));
}

inline conerad::twosex::ModelConfig single_cell(double beta) {
    conerad::twosex::ModelConfig c;
    c.grid.nx = 1;
    c.survival_female = 0.5;
    c.survival_male = 0.5;
    c.sex_ratio = 0.5;
    c.mating.beta = {beta};
    return c;
}

inline conerad::twosex::ModelConfig gaussian_1d(std::size_t cells, double sigma, double beta, double sf = 0.8,
                                                double sm = 0.7, double q = 0.5) {
    conerad::twosex::ModelConfig c;
    c.grid.nx = cells;
    c.dispersal.kind = conerad::twosex::DispersalKind::Gaussian;
    c.dispersal.sigma = sigma;
    c.survival_female = sf;
    c.survival_male = sm;
    c.sex_ratio = q;
    c.mating.beta = {beta};
    return c;
}

/// Two patches on [0, 2], no dispersal, k_f = k_m = 0.25 I per unit area:
/// B(f) = f / 4 for harmonic mean with beta = 2.
inline conerad::twosex::ModelConfig symmetric_two_patch() {
    conerad::twosex::ModelConfig c;
    c.grid.x_range = {0.0, 2.0};
    c.grid.nx = 2;
    c.dispersal.kind = conerad::twosex::DispersalKind::Custom;
    c.dispersal.female = Matrix::from_rows({{0.25, 0.0}, {0.0, 0.25}});
    c.dispersal.male = Matrix::from_rows({{0.25, 0.0}, {0.0, 0.25}});
    c.mating.beta = {2.0};
    return c;
}

} // namespace testing
