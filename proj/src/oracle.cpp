#include "conerad/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "conerad/parallel.hpp"

namespace conerad::oracle {

namespace {

constexpr std::size_t kPowerSteps = 100000;

double horner(const std::vector<double>& p, double x) {
    double v = 0.0;
    for (double c : p) v = v * x + c;
    return v;
}

double horner_abs(const std::vector<double>& p, double x) {
    double v = 0.0;
    for (double c : p) v = v * std::abs(x) + std::abs(c);
    return v;
}

std::vector<double> derivative(const std::vector<double>& p) {
    const std::size_t deg = p.size() - 1;
    std::vector<double> d(deg);
    for (std::size_t k = 0; k < deg; ++k) d[k] = p[k] * static_cast<double>(deg - k);
    return d;
}

double bisect(const std::vector<double>& p, double a, double b) {
    double fa = horner(p, a);
    for (int it = 0; it < 400; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = horner(p, m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// All real roots in [lo, hi], ascending. Multiple roots surface as critical
// points of p where |p| is at rounding level.
std::vector<double> real_roots(const std::vector<double>& p, double lo, double hi) {
    const std::size_t deg = p.size() - 1;
    std::vector<double> roots;
    if (deg == 0) return roots;
    if (deg == 1) {
        const double r = -p[1] / p[0];
        if (r >= lo && r <= hi) roots.push_back(r);
        return roots;
    }
    const std::vector<double> crit = real_roots(derivative(p), lo, hi);
    std::vector<double> knots{lo};
    knots.insert(knots.end(), crit.begin(), crit.end());
    knots.push_back(hi);
    auto negligible = [&](double x) {
        return std::abs(horner(p, x)) <= 64.0 * std::numeric_limits<double>::epsilon() * horner_abs(p, x);
    };
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double fa = horner(p, knots[k]);
        const double fb = horner(p, knots[k + 1]);
        if (fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0)) roots.push_back(bisect(p, knots[k], knots[k + 1]));
    }
    for (double c : crit) {
        if (negligible(c)) roots.push_back(c);
    }
    if (horner(p, lo) == 0.0) roots.push_back(lo);
    if (horner(p, hi) == 0.0) roots.push_back(hi);
    std::sort(roots.begin(), roots.end());
    // A sign flip caused by rounding next to a multiple root lands within a few ulps of it.
    std::vector<double> merged;
    for (double r : roots) {
        if (!merged.empty() && r - merged.back() <= 1e-12 * std::max(1.0, std::abs(r))) {
            merged.back() = r;
        } else {
            merged.push_back(r);
        }
    }
    return merged;
}

std::string describe(const ConeVector& x) {
    std::ostringstream os;
    os.precision(6);
    os << '(';
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ')';
    return os.str();
}

void compositions(std::size_t n, std::size_t total, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() + 1 == n) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (std::size_t a = 0; a <= total; ++a) {
        cur.push_back(a);
        compositions(n, total - a, cur, out);
        cur.pop_back();
    }
}

} // namespace

const char* to_string(Method method) {
    switch (method) {
    case Method::CharPoly:
        return "char_poly";
    case Method::LongPowerIteration:
        return "long_power_iteration";
    case Method::GridSearch:
        break;
    }
    return "grid_search";
}

std::vector<double> characteristic_polynomial(const Matrix& a) {
    if (!a.square()) throw DimensionError("characteristic_polynomial: matrix must be square");
    const std::size_t n = a.rows();
    // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k) / k.
    std::vector<double> c(n + 1, 0.0);
    c[0] = 1.0;
    Matrix m(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        Matrix next = a * m;
        for (std::size_t i = 0; i < n; ++i) next(i, i) += c[k - 1];
        const Matrix am = a * next;
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
        c[k] = -tr / static_cast<double>(k);
        m = std::move(next);
    }
    return c;
}

std::optional<double> largest_real_root(const std::vector<double>& coeffs, double lo, double hi) {
    if (coeffs.empty() || coeffs.front() == 0.0) throw DimensionError("largest_real_root: need a nonzero leading coefficient");
    const std::vector<double> roots = real_roots(coeffs, lo, hi);
    if (roots.empty()) return std::nullopt;
    return roots.back();
}

GraphDiagnostics graph_diagnostics(const Matrix& a) {
    if (!a.square()) throw DimensionError("graph_diagnostics: matrix must be square");
    const std::size_t n = a.rows();
    GraphDiagnostics g;
    if (n == 0) return g;
    auto reach_all = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = 1;
        while (!q.empty()) {
            const std::size_t i = q.front();
            q.pop();
            for (std::size_t j = 0; j < n; ++j) {
                const double w = forward ? a(i, j) : a(j, i);
                if (w > 0.0 && !seen[j]) {
                    seen[j] = 1;
                    q.push(j);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
    };
    g.irreducible = reach_all(true) && reach_all(false);
    if (!g.irreducible) return g;

    std::vector<long> level(n, -1);
    std::queue<std::size_t> q;
    level[0] = 0;
    q.push(0);
    while (!q.empty()) {
        const std::size_t i = q.front();
        q.pop();
        for (std::size_t j = 0; j < n; ++j) {
            if (a(i, j) > 0.0 && level[j] < 0) {
                level[j] = level[i] + 1;
                q.push(j);
            }
        }
    }
    long period = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (a(i, j) > 0.0) period = std::gcd(period, std::abs(level[i] + 1 - level[j]));
        }
    }
    g.period = static_cast<std::size_t>(period);
    return g;
}

namespace {

void check_input(const Matrix& a, const char* who) {
    if (!a.square()) throw DimensionError(std::string(who) + ": matrix must be square");
    if (!a.nonnegative()) throw MapContractError(std::string(who) + ": matrix must be nonnegative");
    if (a.rows() == 0) throw DimensionError(std::string(who) + ": empty matrix");
}

/// min(max row sum, max column sum), an upper bound for the radius.
double sum_bound(const Matrix& a) {
    const std::size_t n = a.rows();
    double row_max = 0.0;
    double col_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rs = 0.0;
        double cs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            rs += a(i, j);
            cs += a(j, i);
        }
        row_max = std::max(row_max, rs);
        col_max = std::max(col_max, cs);
    }
    return std::min(row_max, col_max);
}

} // namespace

OracleReport linear_radius_exact(const Matrix& a) {
    check_input(a, "linear_radius_exact");
    return a.rows() <= kCharPolyMaxDim ? linear_radius_charpoly(a) : linear_radius_power(a);
}

OracleReport linear_radius_charpoly(const Matrix& a) {
    check_input(a, "linear_radius_charpoly");
    if (a.rows() > kCharPolyMaxDim) throw DimensionError("linear_radius_charpoly: dimension above 4");
    OracleReport report;
    report.graph = graph_diagnostics(a);
    const double hi = sum_bound(a);
    report.method = Method::CharPoly;
    if (hi == 0.0) {
        report.certificate = "zero matrix";
        return report;
    }
    const std::vector<double> p = characteristic_polynomial(a);
    const double top = hi * (1.0 + 1e-12) + std::numeric_limits<double>::min();
    const auto root = largest_real_root(p, 0.0, top);
    report.value = root.value_or(0.0);
    report.lower = report.upper = report.value;
    std::ostringstream os;
    os.precision(17);
    os << "largest real root of det(lambda I - A) in [0, " << top << "]";
    report.certificate = os.str();
    return report;
}

OracleReport linear_radius_power(const Matrix& a) {
    check_input(a, "linear_radius_power");
    const std::size_t n = a.rows();
    const double hi = sum_bound(a);
    OracleReport report;
    report.graph = graph_diagnostics(a);
    report.method = Method::LongPowerIteration;
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    double best_lower = 0.0;
    double best_upper = std::numeric_limits<double>::infinity();
    double rho = 0.0;
    std::size_t k = 0;
    for (; k < kPowerSteps; ++k) {
        const std::vector<double> y = a.apply(x);
        double lo_k = std::numeric_limits<double>::infinity();
        double hi_k = 0.0;
        bool positive = true;
        double sy = 0.0;
        double sx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sy += y[i];
            sx += x[i];
            if (x[i] > 0.0) {
                lo_k = std::min(lo_k, y[i] / x[i]);
                hi_k = std::max(hi_k, y[i] / x[i]);
            } else {
                positive = false;
            }
        }
        rho = sy / sx;
        if (positive) {
            best_lower = std::max(best_lower, lo_k);
            best_upper = std::min(best_upper, hi_k);
        }
        if (best_upper - best_lower <= 1e-14 * std::max(1.0, best_lower)) break;
        // Shifted step with A + I, which is primitive whenever A is irreducible.
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += y[i];
            s += x[i];
        }
        if (s == 0.0) break;
        for (double& v : x) v /= s;
    }
    report.iterations = k;
    report.eigenvector = ConeVector(x);
    if (std::isfinite(best_upper)) {
        report.lower = best_lower;
        report.upper = best_upper;
        report.value = best_upper - best_lower <= 1e-8 * std::max(1.0, best_lower) ? 0.5 * (best_lower + best_upper)
                                                                                    : rho;
    } else {
        report.value = rho;
        report.lower = best_lower;
        report.upper = hi;
    }
    std::ostringstream os;
    os.precision(17);
    os << "Collatz-Wielandt enclosure [" << report.lower << ", " << report.upper << "] after " << k
       << " shifted power steps";
    report.certificate = os.str();
    return report;
}

OracleReport brute_force_bracket(const HomogeneousMap& map, std::size_t points_per_axis) {
    const std::size_t n = map.dimension();
    if (n == 0 || n > 3) throw DimensionError("brute_force_bracket: dimension must be 1, 2 or 3");
    if (points_per_axis < 2) throw DimensionError("brute_force_bracket: need at least 2 points per axis");
    const std::size_t total = points_per_axis - 1;

    std::vector<std::vector<std::size_t>> grid;
    std::vector<std::size_t> cur;
    compositions(n, total, cur, grid);

    std::vector<double> lower(grid.size(), 0.0);
    std::vector<double> upper(grid.size(), std::numeric_limits<double>::infinity());
    parallel_for(
        grid.size(),
        [&](std::size_t g) {
            std::vector<double> e(n);
            for (std::size_t i = 0; i < n; ++i) e[i] = static_cast<double>(grid[g][i]) / static_cast<double>(total);
            const ConeVector x(std::move(e));
            const bool interior = x.strictly_positive();
            ConeVector y = x;
            for (std::size_t m = 1; m <= kGridMaxPower; ++m) {
                y = evaluate(map, y);
                const double md = static_cast<double>(m);
                lower[g] = std::max(lower[g], std::pow(lower_ratio(y, x), 1.0 / md));
                if (interior) upper[g] = std::min(upper[g], std::pow(u_norm(y, x), 1.0 / md));
            }
        },
        64);

    OracleReport report;
    report.method = Method::GridSearch;
    const auto lo_it = std::max_element(lower.begin(), lower.end());
    const auto hi_it = std::min_element(upper.begin(), upper.end());
    report.lower = *lo_it;
    report.upper = *hi_it;
    report.value = std::isfinite(report.upper) ? 0.5 * (report.lower + report.upper) : report.lower;
    auto point = [&](std::size_t g) {
        std::vector<double> e(n);
        for (std::size_t i = 0; i < n; ++i) e[i] = static_cast<double>(grid[g][i]) / static_cast<double>(total);
        return ConeVector(std::move(e));
    };
    report.eigenvector = point(static_cast<std::size_t>(lo_it - lower.begin()));
    std::ostringstream os;
    os.precision(17);
    os << grid.size() << " simplex points, powers 1.." << kGridMaxPower << "; lower " << report.lower << " at "
       << describe(point(static_cast<std::size_t>(lo_it - lower.begin()))) << ", upper " << report.upper << " at "
       << describe(point(static_cast<std::size_t>(hi_it - upper.begin())));
    report.certificate = os.str();
    report.iterations = grid.size() * kGridMaxPower;
    return report;
}

} // namespace conerad::oracle
