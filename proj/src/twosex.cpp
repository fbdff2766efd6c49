#include "conerad/twosex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "conerad/parallel.hpp"

namespace conerad::twosex {

namespace {

constexpr double kMassSlack = 1e-12;

// Probability that N(c, sigma^2) lands in [lo, hi], accurate in both tails.
double gaussian_mass(double lo, double hi, double c, double sigma) {
    const double s = sigma * std::numbers::sqrt2;
    const double a = (lo - c) / s;
    const double b = (hi - c) / s;
    if (a >= 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
    if (b <= 0.0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
    return 1.0 - 0.5 * (std::erfc(-a) + std::erfc(b));
}

std::vector<double> expand_field(const std::vector<double>& field, std::size_t n, const std::string& name) {
    if (field.size() != 1 && field.size() != n) {
        throw FieldError(name + ": expected 1 or " + std::to_string(n) + " values, got " +
                         std::to_string(field.size()));
    }
    std::vector<double> out(n, field.front());
    if (field.size() == n) out = field;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(out[i]) || out[i] < 0.0) {
            throw FieldError(name + "[" + std::to_string(i) + "] = " + std::to_string(out[i]) +
                             " is not a finite nonnegative rate");
        }
    }
    return out;
}

void check_fraction(double v, const std::string& name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(name + ": must lie in [0, 1]");
}

std::vector<double> apply_rows(const Matrix& m, const ConeVector& f) {
    std::vector<double> out(m.rows(), 0.0);
    parallel_for(m.rows(), [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * f[j];
        out[i] = s;
    });
    return out;
}

double euclidean(const std::array<double, 2>& p, const std::array<double, 2>& q) {
    return std::hypot(p[0] - q[0], p[1] - q[1]);
}

Matrix gaussian_density(const SpatialGrid& grid, double sigma, double scale) {
    const std::size_t n = grid.size();
    Matrix k(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& c = grid.centers()[j];
        for (std::size_t i = 0; i < n; ++i) {
            const auto lo = grid.lower(i);
            const auto hi = grid.upper(i);
            double mass = gaussian_mass(lo[0], hi[0], c[0], sigma);
            if (grid.dims() == 2) mass *= gaussian_mass(lo[1], hi[1], c[1], sigma);
            k(i, j) = scale * mass / grid.weights()[i];
        }
    }
    return k;
}

Matrix uniform_density(const SpatialGrid& grid, std::optional<double> radius, double scale) {
    const std::size_t n = grid.size();
    Matrix k(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& c = grid.centers()[j];
        double area = 0.0;
        std::vector<std::size_t> reach;
        for (std::size_t i = 0; i < n; ++i) {
            if (!radius || i == j || euclidean(grid.centers()[i], c) <= *radius) {
                reach.push_back(i);
                area += grid.weights()[i];
            }
        }
        for (std::size_t i : reach) k(i, j) = scale / area;
    }
    return k;
}

ConeVector compute_order_bound(const MigrationKernel& female, const MigrationKernel& male,
                               const MatingFunction& mating) {
    const std::size_t n = female.density.rows();
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) m = std::max(m, female.density(i, j) + male.density(i, j));
        u[i] = mating.psi_field()[i] * m;
    }
    return ConeVector(std::move(u));
}

} // namespace

const char* to_string(Sex sex) { return sex == Sex::Female ? "female" : "male"; }

const char* to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::Persistence:
        return "persistence";
    case Verdict::Extinction:
        return "extinction";
    case Verdict::Inconclusive:
        break;
    }
    return "inconclusive";
}

SpatialGrid SpatialGrid::interval(double a, double b, std::size_t n_cells) {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b)) throw ConfigError("grid.bounds: need finite a < b");
    if (n_cells == 0) throw ConfigError("grid.cells: need at least one cell");
    SpatialGrid g;
    g.dims_ = 1;
    g.x_range_ = {a, b};
    g.nx_ = n_cells;
    g.ny_ = 1;
    const double h = (b - a) / static_cast<double>(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        g.centers_.push_back({a + (static_cast<double>(i) + 0.5) * h, 0.0});
        g.weights_.push_back(h);
    }
    return g;
}

SpatialGrid SpatialGrid::rectangle(std::array<double, 2> x_range, std::array<double, 2> y_range, std::size_t nx,
                                   std::size_t ny) {
    for (const auto& r : {x_range, y_range}) {
        if (!(std::isfinite(r[0]) && std::isfinite(r[1]) && r[0] < r[1])) {
            throw ConfigError("grid.bounds: need finite lower < upper on each axis");
        }
    }
    if (nx == 0 || ny == 0) throw ConfigError("grid.cells: need at least one cell per axis");
    SpatialGrid g;
    g.dims_ = 2;
    g.x_range_ = x_range;
    g.y_range_ = y_range;
    g.nx_ = nx;
    g.ny_ = ny;
    const double hx = (x_range[1] - x_range[0]) / static_cast<double>(nx);
    const double hy = (y_range[1] - y_range[0]) / static_cast<double>(ny);
    // Row-major in y: cell (ix, iy) has index iy * nx + ix.
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            g.centers_.push_back({x_range[0] + (static_cast<double>(ix) + 0.5) * hx,
                                  y_range[0] + (static_cast<double>(iy) + 0.5) * hy});
            g.weights_.push_back(hx * hy);
        }
    }
    return g;
}

std::array<double, 2> SpatialGrid::lower(std::size_t i) const {
    const double hx = (x_range_[1] - x_range_[0]) / static_cast<double>(nx_);
    if (dims_ == 1) return {x_range_[0] + static_cast<double>(i) * hx, 0.0};
    const double hy = (y_range_[1] - y_range_[0]) / static_cast<double>(ny_);
    return {x_range_[0] + static_cast<double>(i % nx_) * hx, y_range_[0] + static_cast<double>(i / nx_) * hy};
}

std::array<double, 2> SpatialGrid::upper(std::size_t i) const {
    const double hx = (x_range_[1] - x_range_[0]) / static_cast<double>(nx_);
    if (dims_ == 1) return {x_range_[0] + static_cast<double>(i + 1) * hx, 0.0};
    const double hy = (y_range_[1] - y_range_[0]) / static_cast<double>(ny_);
    return {x_range_[0] + static_cast<double>(i % nx_ + 1) * hx, y_range_[0] + static_cast<double>(i / nx_ + 1) * hy};
}

double SpatialGrid::measure() const noexcept {
    const double lx = x_range_[1] - x_range_[0];
    return dims_ == 1 ? lx : lx * (y_range_[1] - y_range_[0]);
}

std::vector<double> MigrationKernel::column_mass(const std::vector<double>& weights) const {
    std::vector<double> mass(density.cols(), 0.0);
    for (std::size_t i = 0; i < density.rows(); ++i) {
        for (std::size_t j = 0; j < density.cols(); ++j) mass[j] += density(i, j) * weights[i];
    }
    return mass;
}

MigrationKernel make_kernel(Matrix density, Sex role, const SpatialGrid& grid) {
    const std::size_t n = grid.size();
    if (density.rows() != n || density.cols() != n) {
        throw DimensionError(std::string(to_string(role)) + " kernel: expected " + std::to_string(n) + "x" +
                             std::to_string(n) + " matrix");
    }
    if (!density.nonnegative()) throw FieldError(std::string(to_string(role)) + " kernel: negative entry");
    MigrationKernel k;
    k.role = role;
    k.density = std::move(density);
    const auto mass = k.column_mass(grid.weights());
    for (std::size_t j = 0; j < n; ++j) {
        if (mass[j] > 1.0 + kMassSlack) {
            throw KernelMassError(std::string(to_string(role)) + " kernel: column mass " + std::to_string(mass[j]) +
                                      " > 1 at source cell " + std::to_string(j),
                                  role, j);
        }
    }
    k.quadrature = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) k.quadrature(i, j) = k.density(i, j) * grid.weights()[j];
    }
    return k;
}

MatingFunction::MatingFunction(MatingKind kind, std::vector<double> beta1, std::vector<double> beta2)
    : kind_(kind), beta1_(std::move(beta1)), beta2_(std::move(beta2)) {
    psi_.resize(beta1_.size());
    for (std::size_t i = 0; i < beta1_.size(); ++i) {
        psi_[i] = kind_ == MatingKind::HarmonicMean ? 0.5 * beta1_[i] : std::min(beta1_[i], beta2_[i]);
    }
}

MatingFunction MatingFunction::harmonic_mean(std::vector<double> beta) {
    if (beta.empty()) throw FieldError("mating.beta: empty field");
    beta = expand_field(beta, beta.size(), "mating.beta");
    return MatingFunction(MatingKind::HarmonicMean, std::move(beta), {});
}

MatingFunction MatingFunction::min_rate(std::vector<double> beta1, std::vector<double> beta2) {
    if (beta1.empty() || beta1.size() != beta2.size()) {
        throw FieldError("mating.beta1/beta2: fields must be nonempty and of equal length");
    }
    beta1 = expand_field(beta1, beta1.size(), "mating.beta1");
    beta2 = expand_field(beta2, beta2.size(), "mating.beta2");
    return MatingFunction(MatingKind::MinRate, std::move(beta1), std::move(beta2));
}

double MatingFunction::operator()(std::size_t cell, double x1, double x2) const {
    if (kind_ == MatingKind::HarmonicMean) {
        const double s = x1 + x2;
        if (s <= 0.0) return 0.0;
        // Divide first so large arguments cannot overflow the product.
        const double lo = std::min(x1, x2);
        const double hi = std::max(x1, x2);
        return beta1_[cell] * lo * (hi / s);
    }
    return std::min(beta1_[cell] * x1, beta2_[cell] * x2);
}

MatingFunction MatingFunction::scaled(double c) const {
    if (!(c >= 0.0) || !std::isfinite(c)) throw FieldError("mating: scale factor must be finite and nonnegative");
    std::vector<double> b1 = beta1_;
    std::vector<double> b2 = beta2_;
    for (double& b : b1) b *= c;
    for (double& b : b2) b *= c;
    return MatingFunction(kind_, std::move(b1), std::move(b2));
}

double mating_value(const MatingFunction& mating, std::size_t cell, double x1, double x2) {
    return mating(cell, x1, x2);
}

TwoSexModel::TwoSexModel(SpatialGrid grid, MigrationKernel female, MigrationKernel male, MatingFunction mating)
    : grid_(std::move(grid)), female_(std::move(female)), male_(std::move(male)), mating_(std::move(mating)) {
    const std::size_t n = grid_.size();
    if (female_.density.rows() != n || male_.density.rows() != n || mating_.size() != n) {
        throw DimensionError("TwoSexModel: kernels and mating fields must match the grid size");
    }
    order_bound_ = compute_order_bound(female_, male_, mating_);
}

TwoSexModel TwoSexModel::with_scaled_births(double c) const {
    return TwoSexModel(grid_, female_, male_, mating_.scaled(c));
}

HomogeneousMap TwoSexModel::as_map() const {
    auto model = std::make_shared<const TwoSexModel>(*this);
    // Concave homogeneous mating functions are superadditive, and so is their
    // composition with the linear kernels.
    MapFlags flags;
    flags.superadditive = true;
    return HomogeneousMap(
        space(), [model](const ConeVector& f) { return step_next_year(*model, f).data(); }, flags, "twosex");
}

TwoSexModel build_model(const ModelConfig& config) {
    if (config.grid.dims != 1 && config.grid.dims != 2) throw ConfigError("grid.dims: must be 1 or 2");
    SpatialGrid grid = config.grid.dims == 2
                           ? SpatialGrid::rectangle(config.grid.x_range, config.grid.y_range, config.grid.nx,
                                                    config.grid.ny)
                           : SpatialGrid::interval(config.grid.x_range[0], config.grid.x_range[1], config.grid.nx);
    check_fraction(config.survival_female, "survival.female");
    check_fraction(config.survival_male, "survival.male");
    check_fraction(config.sex_ratio, "sex_ratio");
    const std::size_t n = grid.size();

    const double scale_f = config.survival_female * config.sex_ratio;
    const double scale_m = config.survival_male * (1.0 - config.sex_ratio);
    Matrix kf;
    Matrix km;
    switch (config.dispersal.kind) {
    case DispersalKind::Gaussian: {
        if (!config.dispersal.sigma || !(*config.dispersal.sigma > 0.0) || !std::isfinite(*config.dispersal.sigma)) {
            throw ConfigError("dispersal.sigma: Gaussian dispersal needs a finite sigma > 0");
        }
        kf = gaussian_density(grid, *config.dispersal.sigma, scale_f);
        km = gaussian_density(grid, *config.dispersal.sigma, scale_m);
        break;
    }
    case DispersalKind::Uniform: {
        if (config.dispersal.sigma && !(*config.dispersal.sigma >= 0.0)) {
            throw ConfigError("dispersal.sigma: must be nonnegative");
        }
        kf = uniform_density(grid, config.dispersal.sigma, scale_f);
        km = uniform_density(grid, config.dispersal.sigma, scale_m);
        break;
    }
    case DispersalKind::Custom: {
        if (!config.dispersal.female || !config.dispersal.male) {
            throw ConfigError("dispersal: custom dispersal needs both female and male matrices");
        }
        kf = *config.dispersal.female;
        km = *config.dispersal.male;
        break;
    }
    }

    MigrationKernel female = make_kernel(std::move(kf), Sex::Female, grid);
    MigrationKernel male = make_kernel(std::move(km), Sex::Male, grid);

    MatingFunction mating = [&] {
        if (config.mating.kind == MatingKind::HarmonicMean) {
            return MatingFunction::harmonic_mean(expand_field(config.mating.beta, n, "mating.beta"));
        }
        if (config.mating.beta2.empty()) throw FieldError("mating.beta2: min-rate mating needs beta2");
        return MatingFunction::min_rate(expand_field(config.mating.beta, n, "mating.beta1"),
                                        expand_field(config.mating.beta2, n, "mating.beta2"));
    }();
    return TwoSexModel(std::move(grid), std::move(female), std::move(male), std::move(mating));
}

ConeVector step_next_year(const TwoSexModel& model, const ConeVector& f) {
    const std::size_t n = model.size();
    if (f.size() != n) {
        throw DimensionError("step_next_year: expected " + std::to_string(n) + " cells, got " +
                             std::to_string(f.size()));
    }
    if (!f.in_cone()) throw MapContractError("step_next_year: density must be nonnegative");
    const std::vector<double> g1 = apply_rows(model.female_kernel().quadrature, f);
    const std::vector<double> g2 = apply_rows(model.male_kernel().quadrature, f);
    const double mass = model.space().norm(f);
    const auto& psi = model.mating().psi_field();
    const auto& u = model.order_bound();
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = model.mating()(i, g1[i], g2[i]);
        const double local = psi[i] * (g1[i] + g2[i]);
        if (b[i] > local * (1.0 + kMassSlack) + std::numeric_limits<double>::denorm_min()) {
            throw ModelContractError("step_next_year: birth " + std::to_string(b[i]) + " exceeds psi (K1 f + K2 f) = " +
                                     std::to_string(local) + " in cell " + std::to_string(i));
        }
        if (b[i] > mass * u[i] * (1.0 + 1e-10) + std::numeric_limits<double>::denorm_min()) {
            throw ModelContractError("step_next_year: birth " + std::to_string(b[i]) + " exceeds ||f||_1 u = " +
                                     std::to_string(mass * u[i]) + " in cell " + std::to_string(i));
        }
    }
    return ConeVector(std::move(b));
}

ConeVector positive_start(const TwoSexModel& model) {
    const ConeVector& u = model.order_bound();
    if (u.strictly_positive() || u.is_zero()) return u;
    const double top = *std::max_element(u.begin(), u.end());
    return axpy(u, 1e-6 * top, ConeVector::constant(u.size(), 1.0));
}

PersistenceReport assess_persistence(const TwoSexModel& model, double tol, const AssessOptions& options) {
    if (!(tol > 0.0)) throw ConfigError("tol: must be positive");
    PersistenceReport report;
    const HomogeneousMap map = model.as_map();
    const ConeSpace space = model.space();
    const ConeVector start = positive_start(model);

    for (const ConeVector& f0 : options.initial_distributions) {
        const Trajectory t = simulate(model, f0, options.growth_years);
        const YearRecord& last = t.years.back();
        report.growth.push_back({last.year, last.gamma_estimate.value_or(0.0), last.log_total_mass});
    }

    if (start.is_zero()) {
        // No births anywhere: B vanishes and r_+(B) = 0.
        report.verdict = Verdict::Extinction;
        report.bracket.converged = true;
        report.bracket.lower_witness = ConeVector::constant(model.size(), 1.0);
        report.bracket.upper_witness = report.bracket.lower_witness;
        report.eigen_error = "order bound is zero; B vanishes identically";
        return report;
    }
    report.start_regularized = !(start == model.order_bound());
    report.bracket = radius_bracket(map, start, tol, options.max_iter);
    if (report.bracket.cw_lower > 1.0) {
        report.verdict = Verdict::Persistence;
    } else if (report.bracket.cw_upper < 1.0) {
        report.verdict = Verdict::Extinction;
    } else {
        report.verdict = Verdict::Inconclusive;
    }

    try {
        report.eigen = solve_eigenvector_perturbation(map, start, options.eps_schedule, options.inner_tol,
                                                      options.max_inner);
    } catch (const Error& e) {
        report.eigen_error = e.what();
    }
    return report;
}

Trajectory simulate(const TwoSexModel& model, const ConeVector& f0, std::size_t years) {
    if (years == 0) throw ConfigError("years: must be at least 1");
    const ConeSpace space = model.space();
    space.check_dimension(f0);
    if (!f0.in_cone()) throw MapContractError("simulate: initial density must be nonnegative");
    const std::size_t n = model.size();
    const HomogeneousMap map = model.as_map();

    Trajectory traj;
    const double mass0 = space.norm(f0);
    if (mass0 == 0.0) {
        for (std::size_t y = 0; y <= years; ++y) {
            YearRecord r{y, -std::numeric_limits<double>::infinity(), std::nullopt, ConeVector::zeros(n)};
            if (y > 0) r.gamma_estimate = 0.0;
            traj.years.push_back(std::move(r));
        }
        return traj;
    }

    // Growth bound: B^k w <= alpha^k w and f0 <= ||f0||_w w give
    // ||B^k f0|| <= alpha^k ||f0||_w ||w||.
    const ConeVector start = positive_start(model);
    double log_c = 0.0;
    if (!start.is_zero()) {
        const SpectralEstimate bracket = radius_bracket(map, start, 1e-10, 5000);
        traj.cw_upper = bracket.cw_upper;
        const ConeVector& w = bracket.upper_witness;
        log_c = std::log(u_norm(f0, w)) + std::log(space.norm(w)) - std::log(mass0);
    }

    ConeVector y = (1.0 / mass0) * f0;
    double log_mass = std::log(mass0);
    traj.years.push_back({0, log_mass, std::nullopt, y});
    bool extinct = false;
    for (std::size_t k = 1; k <= years; ++k) {
        if (!extinct) {
            const ConeVector z = evaluate(map, y);
            const double nz = space.norm(z);
            if (nz == 0.0) {
                extinct = true;
            } else {
                log_mass += std::log(nz);
                y = (1.0 / nz) * z;
            }
        }
        if (extinct) {
            traj.years.push_back({k, -std::numeric_limits<double>::infinity(), 0.0, ConeVector::zeros(n)});
            continue;
        }
        const double kd = static_cast<double>(k);
        const double gamma = std::exp((log_mass - std::log(mass0)) / kd);
        const double bound = traj.cw_upper * std::exp(log_c / kd);
        if (gamma > bound * (1.0 + 1e-9)) {
            throw ModelContractError("simulate: growth estimate " + std::to_string(gamma) + " at year " +
                                     std::to_string(k) + " exceeds the certified bound " + std::to_string(bound));
        }
        traj.years.push_back({k, log_mass, gamma, y});
    }
    return traj;
}

double log_mass_slope(const Trajectory& trajectory) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double count = 0.0;
    for (const YearRecord& r : trajectory.years) {
        if (!std::isfinite(r.log_total_mass)) return -std::numeric_limits<double>::infinity();
        const double x = static_cast<double>(r.year);
        sx += x;
        sy += r.log_total_mass;
        sxx += x * x;
        sxy += x * r.log_total_mass;
        count += 1.0;
    }
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (count * sxy - sx * sy) / denom;
}

} // namespace conerad::twosex
