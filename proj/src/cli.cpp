#include "conerad/cli.hpp"

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace conerad::cli {

namespace {

using io::Json;
using io::ObjectReader;

const std::set<std::string> kCountTolerances{"max_iter", "max_inner"};

const std::map<Command, std::string> kSections{
    {Command::Eigen, "eigen"},          {Command::Functional, "functional"},
    {Command::TwosexAssess, "assess"},  {Command::TwosexSimulate, "simulate"},
    {Command::Validate, "validate"},
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

std::vector<std::vector<double>> as_vectors(const Json& value, const std::string& path) {
    if (!value.is_array()) throw ConfigError(path + ": expected an array of vectors");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < value.size(); ++i) out.push_back(io::as_vector(value[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

ConeVector checked_vector(const std::vector<double>& v, std::size_t n, const std::string& path) {
    if (v.size() != n) {
        throw ConfigError(path + ": expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    }
    for (double x : v) {
        if (x < 0.0) throw ConfigError(path + ": entries must be nonnegative");
    }
    return ConeVector(v);
}

std::size_t tolerance_count(const InputConfig& in, const std::string& key) {
    return static_cast<std::size_t>(in.tolerances.at(key));
}

struct Output {
    Json result;
    std::optional<std::pair<std::string, std::string>> csv;
    int exit_code = kSuccess;
    std::string summary;
};

ConeVector start_vector(const InputConfig& in, const io::BuiltMap& built) {
    const std::size_t n = built.map.dimension();
    if (in.u) return checked_vector(*in.u, n, "u");
    if (built.model) return twosex::positive_start(*built.model);
    return ConeVector::constant(n, 1.0);
}

Output run_radius(const InputConfig& in, const io::BuiltMap& built) {
    const ConeVector u = start_vector(in, built);
    const double tol = in.tolerances.at("tol");
    const std::size_t max_iter = tolerance_count(in, "max_iter");
    Output o;
    if (u.is_zero()) {
        o.result["value"] = 0.0;
        o.result["bracket"] = Json::array({0.0, 0.0});
        o.result["iterations"] = 0;
        o.result["converged"] = true;
        o.result["note"] = "start vector is zero; the map vanishes on it";
        o.summary = "r_+ = 0";
        return o;
    }
    const SpectralEstimate bracket = radius_bracket(built.map, u, tol, max_iter);
    const SpectralEstimate pq = radius_power_quotient(built.map, u, max_iter, tol);
    o.result = io::to_json(bracket);
    o.result["power_quotient"] = {{"value", pq.value}, {"iterations", pq.iterations}, {"converged", pq.converged}};
    o.result["space"] = io::to_json(built.map.space());
    std::ostringstream csv;
    io::write_spectral_trace(csv, bracket);
    o.csv = {"trace.csv", csv.str()};
    if (!bracket.converged) o.exit_code = kNonConvergence;
    std::ostringstream s;
    s << std::setprecision(12) << "r_+ = " << bracket.value << " in [" << bracket.cw_lower << ", " << bracket.cw_upper
      << "] after " << bracket.iterations << " iterations" << (bracket.converged ? "" : " (not converged)");
    o.summary = s.str();
    return o;
}

Output run_eigen(const InputConfig& in, const io::BuiltMap& built) {
    const ConeVector u = start_vector(in, built);
    Output o;
    EigenResult result;
    std::optional<SpectralEstimate> bracket;
    if (in.eigen_method == "perturbation") {
        result = solve_eigenvector_perturbation(built.map, u, in.eps_schedule, in.tolerances.at("inner_tol"),
                                                tolerance_count(in, "max_inner"));
    } else {
        if (!in.r_est) {
            bracket = radius_bracket(built.map, u, in.tolerances.at("tol"), tolerance_count(in, "max_iter"));
        }
        result = in.r_est ? solve_subeigenvector_min(built.map, u, *in.r_est)
                          : solve_subeigenvector_auto(built.map, u, *bracket);
        if (in.eigen_method == "min_refine") {
            result = refine_eigenvector_monotone(built.map, result.vector, u, result.lambda, in.tolerances.at("inner_tol"),
                                                 tolerance_count(in, "max_inner"));
        }
    }
    o.result = io::to_json(result);
    o.result["method"] = in.eigen_method;
    if (bracket) o.result["radius"] = io::to_json(*bracket);
    std::ostringstream csv;
    io::write_eigen_trace(csv, result);
    o.csv = {"trace.csv", csv.str()};
    if (!result.converged) o.exit_code = kNonConvergence;
    std::ostringstream s;
    s << std::setprecision(12) << "lambda = " << result.lambda << ", residual = " << result.residual << ", mode "
      << (result.mode == EigenMode::Exact ? "exact" : "subeigen");
    o.summary = s.str();
    return o;
}

Output run_functional(const InputConfig& in, const io::BuiltMap& built) {
    const ConeVector u = start_vector(in, built);
    const std::size_t n = built.map.dimension();
    const ConeVector probe = in.probe ? checked_vector(*in.probe, n, "functional.probe") : u;
    std::vector<double> schedule = in.lambda_schedule;
    if (schedule.empty()) {
        const SpectralEstimate b = radius_bracket(built.map, u, 1e-12, tolerance_count(in, "max_iter"));
        const int count = in.lambda_count.value_or(built.map.matrix() ? 8 : 3);
        schedule = default_lambda_schedule(b.cw_upper, count);
    }
    const EigenfunctionalEstimate est = estimate_eigenfunctional(built.map, u, probe, schedule,
                                                                 in.tolerances.at("trunc_tol"), in.samples,
                                                                 in.test_points, in.seed);
    Output o;
    o.result = io::to_json(est);
    o.result["lambda_schedule"] = schedule;
    std::ostringstream s;
    s << std::setprecision(6) << "phi(u) = " << est.phi_of_u << ", relative defect " << est.relative_defect;
    o.summary = s.str();
    return o;
}

Output run_assess(const InputConfig& in, const io::BuiltMap& built) {
    const twosex::TwoSexModel& model = *built.model;
    twosex::AssessOptions options;
    options.max_iter = tolerance_count(in, "max_iter");
    options.inner_tol = in.tolerances.at("inner_tol");
    options.max_inner = tolerance_count(in, "max_inner");
    options.growth_years = in.growth_years;
    for (std::size_t k = 0; k < in.initial_distributions.size(); ++k) {
        options.initial_distributions.push_back(checked_vector(
            in.initial_distributions[k], model.size(), "assess.initial_distributions[" + std::to_string(k) + "]"));
    }
    const twosex::PersistenceReport report = twosex::assess_persistence(model, in.tolerances.at("tol"), options);
    Output o;
    o.result = io::to_json(report);
    o.result["order_bound"] = io::to_json(model.order_bound());
    std::ostringstream csv;
    io::write_spectral_trace(csv, report.bracket);
    o.csv = {"trace.csv", csv.str()};
    if (!report.bracket.converged) o.exit_code = kNonConvergence;
    std::ostringstream s;
    s << std::setprecision(12) << twosex::to_string(report.verdict) << ": r_+ = " << report.bracket.value << " in ["
      << report.bracket.cw_lower << ", " << report.bracket.cw_upper << "]";
    o.summary = s.str();
    return o;
}

Output run_simulate(const InputConfig& in, const io::BuiltMap& built) {
    const twosex::TwoSexModel& model = *built.model;
    const ConeVector f0 =
        in.f0 ? checked_vector(*in.f0, model.size(), "simulate.f0") : ConeVector::constant(model.size(), 1.0);
    const twosex::Trajectory t = twosex::simulate(model, f0, in.years);
    Output o;
    const auto& last = t.years.back();
    o.result["years"] = in.years;
    o.result["final_log_total_mass"] = std::isfinite(last.log_total_mass) ? Json(last.log_total_mass) : Json(nullptr);
    o.result["final_gamma"] = last.gamma_estimate ? Json(*last.gamma_estimate) : Json(nullptr);
    const double slope = twosex::log_mass_slope(t);
    o.result["log_mass_slope"] = std::isfinite(slope) ? Json(slope) : Json(nullptr);
    o.result["cw_upper"] = t.cw_upper;
    o.result["final_shape"] = io::to_json(last.shape);
    std::ostringstream csv;
    io::write_trajectory(csv, t, in.densities);
    o.csv = {"trajectory.csv", csv.str()};
    std::ostringstream s;
    s << std::setprecision(8) << in.years << " years, final gamma "
      << (last.gamma_estimate ? io::format_double(*last.gamma_estimate) : "n/a") << ", log-mass slope "
      << io::format_double(slope);
    o.summary = s.str();
    return o;
}

Output run_validate(const InputConfig& in, const io::BuiltMap& built) {
    const PropertyReport report = verify_properties(built.map, in.trials, in.property_tol, in.seed);
    Output o;
    o.result = io::to_json(report);
    o.result["map"] = built.map.name();
    o.result["flags"] = {{"linear", built.map.flags().linear},
                         {"superadditive", built.map.flags().superadditive},
                         {"strictly_increasing", built.map.flags().strictly_increasing}};
    if (built.map.matrix()) o.result["oracle"] = io::to_json(oracle::linear_radius_exact(*built.map.matrix()));
    if (!report.ok()) o.exit_code = kValidationError;
    o.summary = std::to_string(report.total_violations()) + " violations in " + std::to_string(report.trials) + " trials";
    return o;
}

bool is_numerical_failure(const std::exception& e) {
    return dynamic_cast<const InnerIterationError*>(&e) || dynamic_cast<const TruncationError*>(&e) ||
           dynamic_cast<const ScaleError*>(&e) || dynamic_cast<const ZeroLimitError*>(&e);
}

} // namespace

const char* to_string(Command command) {
    switch (command) {
    case Command::Radius:
        return "radius";
    case Command::Eigen:
        return "eigen";
    case Command::Functional:
        return "functional";
    case Command::TwosexAssess:
        return "twosex-assess";
    case Command::TwosexSimulate:
        return "twosex-simulate";
    case Command::Validate:
        break;
    }
    return "validate";
}

std::optional<Command> command_from_string(const std::string& name) {
    for (Command c : {Command::Radius, Command::Eigen, Command::Functional, Command::TwosexAssess,
                      Command::TwosexSimulate, Command::Validate}) {
        if (name == to_string(c)) return c;
    }
    return std::nullopt;
}

std::map<std::string, double> default_tolerances() {
    return {{"tol", 1e-8},        {"max_iter", 10000},  {"trunc_tol", 1e-10},
            {"inner_tol", 1e-12}, {"max_inner", 1e6}};
}

InputConfig parse_input(const Json& document, Command command) {
    InputConfig in;
    in.command = command;
    ObjectReader r(document, "");

    if (const Json* c = r.get("command")) {
        if (!c->is_string() || c->get<std::string>() != to_string(command)) {
            throw ConfigError(std::string("command: file is for \"") + (c->is_string() ? c->get<std::string>() : "?") +
                              "\" but the \"" + to_string(command) + "\" command was requested");
        }
    }
    if (const Json* s = r.get("seed")) {
        if (!s->is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
        in.seed = s->get<std::uint64_t>();
    }
    if (const Json* t = r.get("tolerances")) {
        ObjectReader tr(*t, "tolerances");
        for (auto& [key, value] : in.tolerances) {
            if (!tr.has(key)) continue;
            value = kCountTolerances.contains(key) ? static_cast<double>(tr.count(key)) : tr.positive(key);
        }
        tr.finish();
    }

    const bool has_map = r.has("map");
    const bool has_model = r.has("model");
    if (has_map == has_model) throw ConfigError("map: exactly one of \"map\" and \"model\" is required");
    if (has_map) {
        in.map = io::parse_map(*r.get("map"), "map");
    } else {
        in.map.kind = "twosex";
        in.map.model = io::parse_model(*r.get("model"), "model");
    }
    const bool twosex_command = command == Command::TwosexAssess || command == Command::TwosexSimulate;
    if (twosex_command && in.map.kind != "twosex") {
        throw ConfigError(std::string(has_map ? "map" : "model") + ": the " + to_string(command) +
                          " command needs a two-sex model");
    }
    if (const Json* u = r.get("u")) {
        if (twosex_command) throw ConfigError("u: the two-sex commands always start from the model's order bound");
        in.u = io::as_vector(*u, "u");
    }

    for (const auto& [cmd, section] : kSections) {
        if (cmd != command && r.has(section)) {
            throw ConfigError(section + ": not accepted by the \"" + to_string(command) + "\" command");
        }
    }

    if (command == Command::Eigen) {
        if (const Json* e = r.get("eigen")) {
            ObjectReader er(*e, "eigen");
            in.eigen_method = er.string("method", "perturbation");
            if (in.eigen_method != "perturbation" && in.eigen_method != "min" && in.eigen_method != "min_refine") {
                throw ConfigError("eigen.method: expected perturbation, min or min_refine");
            }
            if (const Json* eps = er.get("eps_schedule")) {
                in.eps_schedule = io::as_vector(*eps, "eigen.eps_schedule");
                if (in.eps_schedule.empty()) throw ConfigError("eigen.eps_schedule: must not be empty");
                for (std::size_t i = 0; i < in.eps_schedule.size(); ++i) {
                    if (!(in.eps_schedule[i] > 0.0) || (i > 0 && !(in.eps_schedule[i] < in.eps_schedule[i - 1]))) {
                        throw ConfigError("eigen.eps_schedule: must be positive and strictly decreasing");
                    }
                }
            }
            if (er.has("r_est")) in.r_est = er.positive("r_est");
            er.finish();
        }
    } else if (command == Command::Functional) {
        if (const Json* f = r.get("functional")) {
            ObjectReader fr(*f, "functional");
            if (const Json* p = fr.get("probe")) in.probe = io::as_vector(*p, "functional.probe");
            if (const Json* l = fr.get("lambda_schedule")) {
                in.lambda_schedule = io::as_vector(*l, "functional.lambda_schedule");
                if (in.lambda_schedule.empty()) throw ConfigError("functional.lambda_schedule: must not be empty");
            }
            if (fr.has("lambda_count")) in.lambda_count = static_cast<int>(fr.count("lambda_count"));
            if (in.lambda_count && (*in.lambda_count < 1 || *in.lambda_count > 15)) throw ConfigError("functional.lambda_count: expected 1 to 15");
            in.samples = fr.count("samples", 256);
            in.test_points = fr.count("test_points", 100);
            fr.finish();
        }
    } else if (command == Command::TwosexAssess) {
        if (const Json* a = r.get("assess")) {
            ObjectReader ar(*a, "assess");
            if (const Json* d = ar.get("initial_distributions")) {
                in.initial_distributions = as_vectors(*d, "assess.initial_distributions");
            }
            in.growth_years = ar.count("growth_years", 200);
            ar.finish();
        }
    } else if (command == Command::TwosexSimulate) {
        if (const Json* s = r.get("simulate")) {
            ObjectReader sr(*s, "simulate");
            in.years = sr.count("years", 20);
            if (const Json* f = sr.get("f0")) in.f0 = io::as_vector(*f, "simulate.f0");
            in.densities = sr.boolean("densities", false);
            sr.finish();
        }
    } else if (command == Command::Validate) {
        if (const Json* v = r.get("validate")) {
            ObjectReader vr(*v, "validate");
            in.trials = vr.count("trials", 1000);
            in.property_tol = vr.positive("tol", 1e-9);
            vr.finish();
        }
    }
    r.finish();
    return in;
}

InputConfig parse_config(const std::string& path, Command command) {
    const std::string text = read_file(path);
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON in ") + path + ": " + e.what());
    }
    return parse_input(doc, command);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    Json manifest;
    manifest["tool"] = "conerad";
    manifest["version"] = kVersion;
    manifest["command"] = to_string(config.command);

    std::string text;
    InputConfig in;
    try {
        text = read_file(config.input_path);
        Json doc;
        try {
            doc = Json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("config: invalid JSON: ") + e.what());
        }
        in = parse_input(doc, config.command);
        if (config.seed) in.seed = *config.seed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }

    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        err << "error: cannot create " << dir.string() << ": " << ec.message() << '\n';
        return kValidationError;
    }

    Output o;
    try {
        const io::BuiltMap built = io::build_map(in.map);
        switch (config.command) {
        case Command::Radius:
            o = run_radius(in, built);
            break;
        case Command::Eigen:
            o = run_eigen(in, built);
            break;
        case Command::Functional:
            o = run_functional(in, built);
            break;
        case Command::TwosexAssess:
            o = run_assess(in, built);
            break;
        case Command::TwosexSimulate:
            o = run_simulate(in, built);
            break;
        case Command::Validate:
            o = run_validate(in, built);
            break;
        }
    } catch (const std::exception& e) {
        o = Output{};
        o.result["error"] = e.what();
        o.result["converged"] = false;
        if (const auto* ie = dynamic_cast<const InnerIterationError*>(&e)) {
            EigenResult partial;
            partial.trace = ie->trace();
            std::ostringstream csv;
            io::write_eigen_trace(csv, partial);
            o.csv = {"trace.csv", csv.str()};
        }
        o.exit_code = is_numerical_failure(e) ? kNonConvergence : kValidationError;
        err << "error: " << e.what() << '\n';
        if (o.exit_code == kValidationError) return o.exit_code;
    }

    Json result;
    result["command"] = to_string(config.command);
    for (auto it = o.result.begin(); it != o.result.end(); ++it) result[it.key()] = it.value();
    Json tolerances;
    for (const auto& [k, v] : in.tolerances) {
        if (kCountTolerances.contains(k)) {
            tolerances[k] = static_cast<std::uint64_t>(v);
        } else {
            tolerances[k] = v;
        }
    }
    result["tolerances"] = tolerances;
    result["seed"] = in.seed;

    std::vector<std::string> files{"result.json"};
    try {
        write_file(dir / "result.json", result.dump(2) + "\n");
        if (o.csv) {
            write_file(dir / o.csv->first, o.csv->second);
            files.push_back(o.csv->first);
        }
        manifest["seed"] = in.seed;
        manifest["input"] = {{"path", config.input_path}, {"fnv1a64", hex64(io::fnv1a(text))}};
        manifest["tolerances"] = tolerances;
        manifest["files"] = files;
        manifest["exit_code"] = o.exit_code;
        write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }
    if (!config.quiet) out << to_string(config.command) << ": " << o.summary << '\n';
    return o.exit_code;
}

} // namespace conerad::cli
