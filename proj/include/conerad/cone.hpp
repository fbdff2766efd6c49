#pragma once

// Finite-dimensional ordered vector space: R^n with the nonnegative orthant as
// cone, a monotone norm, and the order functionals built on top of them.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "conerad/errors.hpp"

namespace conerad {

/// Finite real vector. Cone membership (all entries >= 0) is a property, not
/// a type distinction, because psi and the diamond norm accept signed input.
class ConeVector {
public:
    ConeVector() = default;
    explicit ConeVector(std::vector<double> entries);
    ConeVector(std::initializer_list<double> entries);

    static ConeVector zeros(std::size_t n);
    static ConeVector constant(std::size_t n, double value);
    /// i-th standard basis vector of R^n.
    static ConeVector basis(std::size_t n, std::size_t i);

    std::size_t size() const noexcept { return entries_.size(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    std::span<const double> entries() const noexcept { return entries_; }
    const std::vector<double>& data() const noexcept { return entries_; }

    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    bool in_cone() const noexcept;
    bool is_zero() const noexcept;
    bool strictly_positive() const noexcept;

    friend bool operator==(const ConeVector&, const ConeVector&) = default;

private:
    std::vector<double> entries_;
};

ConeVector operator+(const ConeVector& x, const ConeVector& y);
ConeVector operator-(const ConeVector& x, const ConeVector& y);
ConeVector operator-(const ConeVector& x);
ConeVector operator*(double alpha, const ConeVector& x);
/// x + alpha * y
ConeVector axpy(const ConeVector& x, double alpha, const ConeVector& y);
double dot(const ConeVector& x, const ConeVector& y);
/// Entrywise positive part.
ConeVector positive_part(const ConeVector& x);

enum class NormKind { L1, LInf, Weighted };

/// R^n ordered by the nonnegative orthant, with an L1, LInf, or weighted L1
/// norm. All three are absolute norms, so they are monotone on the cone and
/// the normality constants of the space equal 1.
class ConeSpace {
public:
    ConeSpace(std::size_t dimension, NormKind kind);
    /// Weighted L1 norm sum_i w_i |x_i|, weights strictly positive.
    ConeSpace(std::size_t dimension, std::vector<double> weights);

    static ConeSpace l1(std::size_t n) { return {n, NormKind::L1}; }
    static ConeSpace linf(std::size_t n) { return {n, NormKind::LInf}; }

    std::size_t dimension() const noexcept { return dimension_; }
    NormKind norm_kind() const noexcept { return kind_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    double norm(const ConeVector& x) const;
    void check_dimension(const ConeVector& x) const;

    friend bool operator==(const ConeSpace&, const ConeSpace&) = default;

private:
    std::size_t dimension_;
    NormKind kind_;
    std::vector<double> weights_;
};

/// x <= y in the cone order. Exact, no tolerance.
bool leq(const ConeVector& x, const ConeVector& y);

/// Greatest lower bound (entrywise minimum).
ConeVector meet(const ConeVector& x, const ConeVector& y);

/// Entrywise maximum.
ConeVector join(const ConeVector& x, const ConeVector& y);

/// psi(x) = inf { ||y|| : y >= x }. For monotone norms this is ||x^+||.
double psi_hull(const ConeSpace& space, const ConeVector& x);

/// max(psi(x), psi(-x)); an equivalent norm that is monotone on the cone.
double diamond_norm(const ConeSpace& space, const ConeVector& x);

/// Order-unit norm ||x||_u = inf { c > 0 : -cu <= x <= cu }.
/// Returns +infinity when x is not u-bounded (x_i != 0 where u_i = 0).
double u_norm(const ConeVector& x, const ConeVector& u);

/// [x]_u = sup { beta >= 0 : beta u <= x }, for x and u in the cone.
double lower_ratio(const ConeVector& x, const ConeVector& u);

} // namespace conerad
