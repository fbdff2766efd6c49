#include "conerad/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace conerad::io {

namespace {

const char* type_name(const Json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_null()) return "null";
    return "number";
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError((path.empty() ? std::string("config") : path) + ": " + message);
}

const char* norm_name(NormKind kind) {
    switch (kind) {
    case NormKind::L1:
        return "l1";
    case NormKind::LInf:
        return "linf";
    case NormKind::Weighted:
        break;
    }
    return "weighted_l1";
}

ConeSpace parse_norm(const Json& value, const std::string& path, std::size_t n) {
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        if (s == "l1") return ConeSpace::l1(n);
        if (s == "linf") return ConeSpace::linf(n);
        fail(path, "unknown norm \"" + s + "\" (expected \"l1\", \"linf\" or {\"weights\": [...]})");
    }
    ObjectReader r(value, path);
    std::vector<double> w = as_vector(r.require("weights"), r.child("weights"));
    r.finish();
    if (w.size() != n) fail(r.child("weights"), "expected " + std::to_string(n) + " weights");
    for (double x : w) {
        if (!(x > 0.0)) fail(r.child("weights"), "weights must be positive");
    }
    return ConeSpace(n, std::move(w));
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vector_json(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(number_or_null(x));
    return out;
}

} // namespace

ObjectReader::ObjectReader(const Json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) fail(path_, std::string("expected an object, got ") + type_name(value_));
}

bool ObjectReader::has(const std::string& key) const { return value_.contains(key); }

const Json* ObjectReader::get(const std::string& key) {
    used_.insert(key);
    const auto it = value_.find(key);
    return it == value_.end() ? nullptr : &*it;
}

const Json& ObjectReader::require(const std::string& key) {
    const Json* v = get(key);
    if (!v) fail(child(key), "missing required field");
    return *v;
}

double ObjectReader::number(const std::string& key, std::optional<double> fallback) {
    const Json* v = get(key);
    if (!v) {
        if (!fallback) fail(child(key), "missing required field");
        return *fallback;
    }
    return as_number(*v, child(key));
}

double ObjectReader::positive(const std::string& key, std::optional<double> fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0)) fail(child(key), "must be positive");
    return v;
}

std::size_t ObjectReader::count(const std::string& key, std::optional<std::size_t> fallback) {
    const Json* v = get(key);
    if (!v) {
        if (!fallback) fail(child(key), "missing required field");
        return *fallback;
    }
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
        fail(child(key), std::string("expected a positive integer, got ") + type_name(*v));
    }
    const long long n = v->get<long long>();
    if (n <= 0) fail(child(key), "must be a positive integer");
    return static_cast<std::size_t>(n);
}

std::string ObjectReader::string(const std::string& key, std::optional<std::string> fallback) {
    const Json* v = get(key);
    if (!v) {
        if (!fallback) fail(child(key), "missing required field");
        return *fallback;
    }
    if (!v->is_string()) fail(child(key), std::string("expected a string, got ") + type_name(*v));
    return v->get<std::string>();
}

bool ObjectReader::boolean(const std::string& key, std::optional<bool> fallback) {
    const Json* v = get(key);
    if (!v) {
        if (!fallback) fail(child(key), "missing required field");
        return *fallback;
    }
    if (!v->is_boolean()) fail(child(key), std::string("expected a boolean, got ") + type_name(*v));
    return v->get<bool>();
}

void ObjectReader::finish() const {
    for (auto it = value_.begin(); it != value_.end(); ++it) {
        if (!used_.contains(it.key())) fail(child(it.key()), "unknown key");
    }
}

double as_number(const Json& value, const std::string& path) {
    if (!value.is_number()) fail(path, std::string("expected a number, got ") + type_name(value));
    const double v = value.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

std::vector<double> as_vector(const Json& value, const std::string& path) {
    if (!value.is_array()) fail(path, std::string("expected an array of numbers, got ") + type_name(value));
    std::vector<double> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) out.push_back(as_number(value[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<double> as_field(const Json& value, const std::string& path) {
    if (value.is_number()) return {as_number(value, path)};
    std::vector<double> v = as_vector(value, path);
    if (v.empty()) fail(path, "field must not be empty");
    return v;
}

Matrix as_matrix(const Json& value, const std::string& path) {
    if (!value.is_array() || value.empty()) fail(path, "expected a nonempty array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < value.size(); ++i) {
        rows.push_back(as_vector(value[i], path + "[" + std::to_string(i) + "]"));
        if (rows.back().size() != rows.front().size()) fail(path + "[" + std::to_string(i) + "]", "ragged matrix row");
    }
    return Matrix::from_rows(rows);
}

twosex::ModelConfig parse_model(const Json& value, const std::string& path) {
    using namespace twosex;
    ModelConfig cfg;
    ObjectReader r(value, path);

    {
        ObjectReader g(r.require("grid"), r.child("grid"));
        const std::string kind = g.string("kind", "interval");
        if (kind == "interval") {
            cfg.grid.dims = 1;
            const auto b = as_vector(g.require("bounds"), g.child("bounds"));
            if (b.size() != 2) fail(g.child("bounds"), "expected [a, b]");
            cfg.grid.x_range = {b[0], b[1]};
            cfg.grid.nx = g.count("cells");
            cfg.grid.ny = 1;
        } else if (kind == "rectangle") {
            cfg.grid.dims = 2;
            const auto x = as_vector(g.require("x"), g.child("x"));
            const auto y = as_vector(g.require("y"), g.child("y"));
            if (x.size() != 2) fail(g.child("x"), "expected [x0, x1]");
            if (y.size() != 2) fail(g.child("y"), "expected [y0, y1]");
            cfg.grid.x_range = {x[0], x[1]};
            cfg.grid.y_range = {y[0], y[1]};
            const Json& cells = g.require("cells");
            if (!cells.is_array() || cells.size() != 2 || !cells[0].is_number_integer() ||
                !cells[1].is_number_integer() || cells[0].get<long long>() <= 0 || cells[1].get<long long>() <= 0) {
                fail(g.child("cells"), "expected [nx, ny] with positive integers");
            }
            cfg.grid.nx = cells[0].get<std::size_t>();
            cfg.grid.ny = cells[1].get<std::size_t>();
        } else {
            fail(g.child("kind"), "unknown grid kind \"" + kind + "\" (expected \"interval\" or \"rectangle\")");
        }
        g.finish();
    }

    if (const Json* d = r.get("dispersal")) {
        ObjectReader dr(*d, r.child("dispersal"));
        const std::string kind = dr.string("kind");
        if (kind == "gaussian") {
            cfg.dispersal.kind = DispersalKind::Gaussian;
            cfg.dispersal.sigma = dr.positive("sigma");
        } else if (kind == "uniform") {
            cfg.dispersal.kind = DispersalKind::Uniform;
            if (dr.has("sigma")) {
                const double s = dr.number("sigma");
                if (s < 0.0) fail(dr.child("sigma"), "must be nonnegative");
                cfg.dispersal.sigma = s;
            }
        } else if (kind == "custom") {
            cfg.dispersal.kind = DispersalKind::Custom;
            cfg.dispersal.female = as_matrix(dr.require("female"), dr.child("female"));
            cfg.dispersal.male = as_matrix(dr.require("male"), dr.child("male"));
        } else {
            fail(dr.child("kind"), "unknown dispersal kind \"" + kind + "\" (expected gaussian, uniform or custom)");
        }
        dr.finish();
    }

    {
        ObjectReader s(r.require("survival"), r.child("survival"));
        cfg.survival_female = s.number("female");
        cfg.survival_male = s.number("male");
        s.finish();
        if (cfg.survival_female < 0.0 || cfg.survival_female > 1.0) fail(s.child("female"), "must lie in [0, 1]");
        if (cfg.survival_male < 0.0 || cfg.survival_male > 1.0) fail(s.child("male"), "must lie in [0, 1]");
    }
    cfg.sex_ratio = r.number("sex_ratio", 0.5);
    if (cfg.sex_ratio < 0.0 || cfg.sex_ratio > 1.0) fail(r.child("sex_ratio"), "must lie in [0, 1]");

    {
        ObjectReader m(r.require("mating"), r.child("mating"));
        const std::string kind = m.string("kind", "harmonic_mean");
        if (kind == "harmonic_mean") {
            cfg.mating.kind = MatingKind::HarmonicMean;
            cfg.mating.beta = as_field(m.require("beta"), m.child("beta"));
        } else if (kind == "min_rate") {
            cfg.mating.kind = MatingKind::MinRate;
            cfg.mating.beta = as_field(m.require("beta1"), m.child("beta1"));
            cfg.mating.beta2 = as_field(m.require("beta2"), m.child("beta2"));
        } else {
            fail(m.child("kind"), "unknown mating kind \"" + kind + "\" (expected harmonic_mean or min_rate)");
        }
        m.finish();
    }
    r.finish();
    return cfg;
}

MapSpec parse_map(const Json& value, const std::string& path) {
    MapSpec spec;
    ObjectReader r(value, path);
    spec.kind = r.string("kind", r.has("matrices") ? "min_linear" : "linear");
    if (spec.kind == "linear") {
        spec.matrices.push_back(as_matrix(r.require("matrix"), r.child("matrix")));
    } else if (spec.kind == "min_linear" || spec.kind == "max_linear") {
        const Json& ms = r.require("matrices");
        if (!ms.is_array() || ms.empty()) fail(r.child("matrices"), "expected a nonempty array of matrices");
        for (std::size_t k = 0; k < ms.size(); ++k) {
            spec.matrices.push_back(as_matrix(ms[k], r.child("matrices") + "[" + std::to_string(k) + "]"));
        }
    } else if (spec.kind == "twosex") {
        spec.model = parse_model(r.require("model"), r.child("model"));
    } else {
        fail(r.child("kind"), "unknown map kind \"" + spec.kind + "\" (expected linear, min_linear, max_linear or twosex)");
    }
    for (std::size_t k = 0; k < spec.matrices.size(); ++k) {
        const Matrix& m = spec.matrices[k];
        const std::string where = spec.kind == "linear" ? r.child("matrix") : r.child("matrices") + "[" + std::to_string(k) + "]";
        if (!m.square()) fail(where, "matrix must be square");
        if (!m.nonnegative()) fail(where, "matrix must be entrywise nonnegative");
        if (m.rows() != spec.matrices.front().rows()) fail(where, "all matrices must have the same size");
    }
    if (const Json* n = r.get("norm")) {
        if (spec.kind == "twosex") fail(r.child("norm"), "two-sex maps always use the weighted L1 norm of the grid");
        spec.space = parse_norm(*n, r.child("norm"), spec.matrices.front().rows());
    }
    r.finish();
    return spec;
}

BuiltMap build_map(const MapSpec& spec) {
    if (spec.kind == "twosex") {
        twosex::TwoSexModel model = twosex::build_model(*spec.model);
        HomogeneousMap map = model.as_map();
        return {std::move(map), std::move(model)};
    }
    const std::size_t n = spec.matrices.front().rows();
    const ConeSpace space = spec.space.value_or(ConeSpace::l1(n));
    if (spec.kind == "linear") return {HomogeneousMap::linear(spec.matrices.front(), space), std::nullopt};
    if (spec.kind == "min_linear") return {min_linear_map(spec.matrices, space), std::nullopt};
    return {max_linear_map(spec.matrices, space), std::nullopt};
}

Json to_json(const ConeVector& x) { return vector_json(x.data()); }

Json to_json(const ConeSpace& space) {
    Json j;
    j["dimension"] = space.dimension();
    j["norm"] = norm_name(space.norm_kind());
    if (space.norm_kind() == NormKind::Weighted) j["weights"] = vector_json(space.weights());
    return j;
}

Json to_json(const SpectralEstimate& est, bool include_traces) {
    Json j;
    j["value"] = number_or_null(est.value);
    j["bracket"] = Json::array({number_or_null(est.cw_lower), number_or_null(est.cw_upper)});
    j["iterations"] = est.iterations;
    j["converged"] = est.converged;
    if (!est.lower_witness.data().empty()) j["lower_witness"] = to_json(est.lower_witness);
    if (!est.upper_witness.data().empty()) j["upper_witness"] = to_json(est.upper_witness);
    if (include_traces) {
        j["log_norm_trace"] = vector_json(est.log_norm_trace);
        j["lower_trace"] = vector_json(est.lower_trace);
        j["upper_trace"] = vector_json(est.upper_trace);
    }
    return j;
}

Json to_json(const EigenResult& result) {
    Json j;
    j["lambda"] = number_or_null(result.lambda);
    j["lambda_raw"] = number_or_null(result.lambda_raw);
    j["residual"] = number_or_null(result.residual);
    j["subeigen_defect"] = number_or_null(result.subeigen_defect);
    j["mode"] = result.mode == EigenMode::Exact ? "exact" : "subeigen";
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["vector"] = to_json(result.vector);
    return j;
}

Json to_json(const PropertyReport& report) {
    Json j;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    j["tol"] = report.tol;
    j["ok"] = report.ok();
    j["violations"] = {{"homogeneity", report.homogeneity_violations},
                       {"monotonicity", report.monotonicity_violations},
                       {"superadditivity", report.superadditivity_violations}};
    j["max_defect"] = {{"homogeneity", report.max_homogeneity_defect},
                       {"monotonicity", report.max_monotonicity_defect},
                       {"superadditivity", report.max_superadditivity_defect}};
    Json ex = Json::array();
    for (const auto& v : report.examples) ex.push_back({{"property", v.property}, {"trial", v.trial}, {"defect", v.defect}});
    j["examples"] = ex;
    return j;
}

Json to_json(const oracle::OracleReport& report) {
    Json j;
    j["value"] = number_or_null(report.value);
    j["method"] = oracle::to_string(report.method);
    j["bracket"] = Json::array({number_or_null(report.lower), number_or_null(report.upper)});
    j["certificate"] = report.certificate;
    if (report.graph) {
        j["irreducible"] = report.graph->irreducible;
        j["period"] = report.graph->period;
        j["primitive"] = report.graph->primitive();
    }
    if (report.eigenvector) j["witness"] = to_json(*report.eigenvector);
    return j;
}

Json to_json(const twosex::PersistenceReport& report) {
    Json j;
    j["verdict"] = twosex::to_string(report.verdict);
    j["radius"] = to_json(report.bracket);
    j["start_regularized"] = report.start_regularized;
    if (report.eigen) {
        j["eigen"] = to_json(*report.eigen);
    } else {
        j["eigen"] = nullptr;
        j["eigen_error"] = report.eigen_error;
    }
    Json growth = Json::array();
    for (const auto& g : report.growth) {
        growth.push_back({{"years", g.years}, {"gamma", number_or_null(g.gamma)},
                          {"log_total_mass", number_or_null(g.log_total_mass)}});
    }
    j["growth"] = growth;
    return j;
}

Json to_json(const EigenfunctionalEstimate& est) {
    Json j;
    j["lambda_used"] = est.lambda_used;
    j["normalizer"] = est.normalizer;
    j["radius"] = est.radius;
    j["relative_defect"] = number_or_null(est.relative_defect);
    j["absolute_defect"] = number_or_null(est.absolute_defect);
    j["phi_of_u"] = est.phi_of_u;
    j["test_points"] = est.test_points;
    j["seed"] = est.seed;
    j["probe_vector"] = to_json(est.probe_vector);
    Json basis = Json::array();
    for (std::size_t i = 0; i < est.probe_vector.size(); ++i) {
        basis.push_back(number_or_null(est.evaluator(ConeVector::basis(est.probe_vector.size(), i))));
    }
    j["phi_basis"] = basis;
    return j;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_spectral_trace(std::ostream& os, const SpectralEstimate& est) {
    os << "iteration,log_norm,lower,upper\n";
    const std::size_t rows = std::max({est.log_norm_trace.size(), est.lower_trace.size(), est.upper_trace.size()});
    auto cell = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? format_double(v[i]) : ""; };
    for (std::size_t i = 0; i < rows; ++i) {
        os << i + 1 << ',' << cell(est.log_norm_trace, i) << ',' << cell(est.lower_trace, i) << ','
           << cell(est.upper_trace, i) << '\n';
    }
}

void write_eigen_trace(std::ostream& os, const EigenResult& result) {
    os << "step,parameter,lambda,residual,inner_iterations\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const auto& t = result.trace[i];
        os << i + 1 << ',' << format_double(t.parameter) << ',' << format_double(t.lambda) << ','
           << format_double(t.residual) << ',' << t.inner_iterations << '\n';
    }
}

void write_trajectory(std::ostream& os, const twosex::Trajectory& trajectory, bool densities) {
    os << "year,log_total_mass,gamma_estimate";
    const std::size_t n = trajectory.years.empty() ? 0 : trajectory.years.front().shape.size();
    if (densities) {
        for (std::size_t i = 0; i < n; ++i) os << ",cell_" << i;
    }
    os << '\n';
    for (const auto& r : trajectory.years) {
        os << r.year << ',' << format_double(r.log_total_mass) << ','
           << (r.gamma_estimate ? format_double(*r.gamma_estimate) : "");
        if (densities) {
            // Densities are reconstructed from shape and log mass.
            const double mass = std::exp(r.log_total_mass);
            for (std::size_t i = 0; i < n; ++i) os << ',' << format_double(mass * r.shape[i]);
        }
        os << '\n';
    }
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace conerad::io
