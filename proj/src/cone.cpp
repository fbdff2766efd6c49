#include "conerad/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace conerad {

namespace {

void require_same_size(const ConeVector& x, const ConeVector& y, const char* op) {
    if (x.size() != y.size()) {
        throw DimensionError(std::string(op) + ": dimension mismatch (" +
                             std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
    }
}

void require_nonzero_bound(const ConeVector& u, const char* op) {
    if (u.is_zero()) {
        throw DegenerateBoundError(std::string(op) + ": order bound u is zero");
    }
    if (!u.in_cone()) {
        throw DegenerateBoundError(std::string(op) + ": order bound u is not in the cone");
    }
}

} // namespace

ConeVector::ConeVector(std::vector<double> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!std::isfinite(entries_[i])) {
            throw NonFiniteError("vector entry " + std::to_string(i) + " is not finite");
        }
    }
}

ConeVector::ConeVector(std::initializer_list<double> entries)
    : ConeVector(std::vector<double>(entries)) {}

ConeVector ConeVector::zeros(std::size_t n) { return ConeVector(std::vector<double>(n, 0.0)); }

ConeVector ConeVector::constant(std::size_t n, double value) {
    return ConeVector(std::vector<double>(n, value));
}

ConeVector ConeVector::basis(std::size_t n, std::size_t i) {
    std::vector<double> e(n, 0.0);
    e.at(i) = 1.0;
    return ConeVector(std::move(e));
}

bool ConeVector::in_cone() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v >= 0.0; });
}

bool ConeVector::is_zero() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v == 0.0; });
}

bool ConeVector::strictly_positive() const noexcept {
    return !entries_.empty() &&
           std::all_of(entries_.begin(), entries_.end(), [](double v) { return v > 0.0; });
}

ConeVector operator+(const ConeVector& x, const ConeVector& y) {
    require_same_size(x, y, "operator+");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
    return ConeVector(std::move(out));
}

ConeVector operator-(const ConeVector& x, const ConeVector& y) {
    require_same_size(x, y, "operator-");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
    return ConeVector(std::move(out));
}

ConeVector operator-(const ConeVector& x) { return -1.0 * x; }

ConeVector operator*(double alpha, const ConeVector& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * x[i];
    return ConeVector(std::move(out));
}

ConeVector axpy(const ConeVector& x, double alpha, const ConeVector& y) {
    require_same_size(x, y, "axpy");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + alpha * y[i];
    return ConeVector(std::move(out));
}

double dot(const ConeVector& x, const ConeVector& y) {
    require_same_size(x, y, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

ConeVector positive_part(const ConeVector& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(x[i], 0.0);
    return ConeVector(std::move(out));
}

ConeSpace::ConeSpace(std::size_t dimension, NormKind kind) : dimension_(dimension), kind_(kind) {
    if (dimension == 0) throw DimensionError("ConeSpace: dimension must be >= 1");
    if (kind == NormKind::Weighted) {
        throw DimensionError("ConeSpace: weighted norm requires a weight vector");
    }
}

ConeSpace::ConeSpace(std::size_t dimension, std::vector<double> weights)
    : dimension_(dimension), kind_(NormKind::Weighted), weights_(std::move(weights)) {
    if (dimension == 0) throw DimensionError("ConeSpace: dimension must be >= 1");
    if (weights_.size() != dimension) {
        throw DimensionError("ConeSpace: expected " + std::to_string(dimension) + " weights, got " +
                             std::to_string(weights_.size()));
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_[i]) || weights_[i] <= 0.0) {
            throw DegenerateBoundError("ConeSpace: weight " + std::to_string(i) +
                                       " must be finite and strictly positive");
        }
    }
}

void ConeSpace::check_dimension(const ConeVector& x) const {
    if (x.size() != dimension_) {
        throw DimensionError("vector of length " + std::to_string(x.size()) +
                             " in space of dimension " + std::to_string(dimension_));
    }
}

double ConeSpace::norm(const ConeVector& x) const {
    check_dimension(x);
    double s = 0.0;
    switch (kind_) {
    case NormKind::L1:
        for (double v : x) s += std::abs(v);
        break;
    case NormKind::LInf:
        for (double v : x) s = std::max(s, std::abs(v));
        break;
    case NormKind::Weighted:
        for (std::size_t i = 0; i < x.size(); ++i) s += weights_[i] * std::abs(x[i]);
        break;
    }
    return s;
}

bool leq(const ConeVector& x, const ConeVector& y) {
    require_same_size(x, y, "leq");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] - x[i] >= 0.0)) return false;
    }
    return true;
}

ConeVector meet(const ConeVector& x, const ConeVector& y) {
    require_same_size(x, y, "meet");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(x[i], y[i]);
    return ConeVector(std::move(out));
}

ConeVector join(const ConeVector& x, const ConeVector& y) {
    require_same_size(x, y, "join");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(x[i], y[i]);
    return ConeVector(std::move(out));
}

double psi_hull(const ConeSpace& space, const ConeVector& x) {
    return space.norm(positive_part(x));
}

double diamond_norm(const ConeSpace& space, const ConeVector& x) {
    return std::max(psi_hull(space, x), psi_hull(space, -x));
}

double u_norm(const ConeVector& x, const ConeVector& u) {
    require_same_size(x, u, "u_norm");
    require_nonzero_bound(u, "u_norm");
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (u[i] > 0.0) {
            c = std::max(c, std::abs(x[i]) / u[i]);
        } else if (x[i] != 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return c;
}

double lower_ratio(const ConeVector& x, const ConeVector& u) {
    require_same_size(x, u, "lower_ratio");
    require_nonzero_bound(u, "lower_ratio");
    double beta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (u[i] > 0.0) beta = std::min(beta, x[i] / u[i]);
    }
    return std::max(beta, 0.0);
}

} // namespace conerad
