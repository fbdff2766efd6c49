#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "conerad/cli.hpp"

using namespace conerad;
using namespace conerad::cli;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("conerad_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    std::string write(const std::string& file, const std::string& text) const {
        std::ofstream(dir / file) << text;
        return (dir / file).string();
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

io::Json load(const fs::path& p) { return io::Json::parse(slurp(p)); }

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(Command command, const std::string& input, const fs::path& out_dir) {
    RunConfig rc;
    rc.command = command;
    rc.input_path = input;
    rc.output_dir = out_dir.string();
    std::ostringstream out, err;
    const int code = run(rc, out, err);
    return {code, out.str(), err.str()};
}

std::string error_of(const std::string& text, Command command) {
    try {
        parse_input(io::Json::parse(text), command);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kSingleCell = R"({"model": {"grid": {"kind": "interval", "bounds": [0, 1], "cells": 1},
    "survival": {"female": 0.5, "male": 0.5}, "sex_ratio": 0.5,
    "mating": {"kind": "harmonic_mean", "beta": 2}}})";

} // namespace

TEST_CASE("defaults") {
    const InputConfig in = parse_input(io::Json::parse(R"({"map": {"matrix": [[1, 1], [1, 1]]}})"), Command::Radius);
    CHECK(in.tolerances.at("tol") == 1e-8);
    CHECK(in.tolerances.at("max_iter") == 10000);
    CHECK(in.seed == kDefaultSeed);
    CHECK(in.map.kind == "linear");
}

TEST_CASE("strict schema") {
    CHECK(error_of(R"({"map": {"matrix": [[1]]}, "tolerances": {"tol": -1}})", Command::Radius).find("tolerances.tol") !=
          std::string::npos);
    CHECK(error_of(R"({"map": {"matrix": [[1]]}, "tolerances": {"tol": 0}})", Command::Radius) != "");
    CHECK(error_of(R"({"map": {"matrix": [[1]]}, "tolerances": {"tolx": 1e-3}})", Command::Radius)
              .find("tolerances.tolx") != std::string::npos);
    CHECK(error_of(R"({"map": {"matrix": [[1]], "extra": 1}})", Command::Radius).find("map.extra") != std::string::npos);
    CHECK(error_of(R"({"map": {"matrix": [[1]]}, "eigen": {}})", Command::Radius).find("eigen") != std::string::npos);
    CHECK(error_of(R"({"map": {"matrix": [[1]]}})", Command::TwosexAssess) != "");
    CHECK(error_of(R"({"map": {"matrix": [[1]]}, "model": {}})", Command::Radius) != "");
    CHECK(error_of(R"({"map": {"matrix": [[1, 2]]}, "tolerances": {"max_iter": 1.5}})", Command::Radius)
              .find("max_iter") != std::string::npos);
    CHECK(error_of(R"({"map": {"matrix": "no"}})", Command::Radius).find("map.matrix") != std::string::npos);
    CHECK(error_of(R"({"model": {"grid": {"kind": "interval", "bounds": [0, 1], "cells": 2},
        "mating": {"kind": "harmonic_mean", "beta": 1}, "dispersal": {"kind": "gaussian", "sigma": "x"}}})",
                   Command::TwosexAssess)
              .find("model.dispersal.sigma") != std::string::npos);
    CHECK(error_of(R"({"command": "radius", "map": {"matrix": [[1]]}})", Command::Eigen) != "");
}

TEST_CASE("kernel mass errors name the cell") {
    Scratch s("mass");
    const std::string cfg = s.write("in.json", R"({"model": {"grid": {"kind": "interval", "bounds": [0, 3], "cells": 3},
        "dispersal": {"kind": "custom", "female": [[0.1, 0.2, 0.3], [0.1, 0.2, 0.5], [0.1, 0.2, 0.3]],
                      "male": [[0.1, 0, 0], [0, 0.1, 0], [0, 0, 0.1]]},
        "survival": {"female": 1, "male": 1}, "mating": {"kind": "harmonic_mean", "beta": 1}}})");
    const Outcome o = invoke(Command::TwosexAssess, cfg, s.dir / "out");
    CHECK(o.code == kValidationError);
    CHECK(o.err.find("source cell 2") != std::string::npos);
}

TEST_CASE("radius run writes result, trace and manifest") {
    Scratch s("radius");
    const std::string cfg = s.write("in.json", R"({"map": {"matrix": [[1, 1], [1, 1]]}})");
    const Outcome o = invoke(Command::Radius, cfg, s.dir / "out");
    REQUIRE(o.code == kSuccess);
    const io::Json r = load(s.dir / "out" / "result.json");
    CHECK(r["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r["bracket"][0].get<double>() <= 2.0);
    CHECK(r["bracket"][1].get<double>() >= 2.0);
    CHECK(r.contains("iterations"));
    CHECK(r["seed"] == kDefaultSeed);
    CHECK(r["tolerances"]["max_iter"].is_number_integer());
    const io::Json m = load(s.dir / "out" / "manifest.json");
    CHECK(m["version"] == kVersion);
    CHECK(m["exit_code"] == 0);
    for (const auto& f : m["files"]) CHECK(fs::exists(s.dir / "out" / f.get<std::string>()));
    std::size_t on_disk = 0;
    for (const auto& e : fs::directory_iterator(s.dir / "out")) on_disk += e.path().filename() != "manifest.json";
    CHECK(on_disk == m["files"].size());
    CHECK(slurp(s.dir / "out" / "trace.csv").rfind("iteration,log_norm,lower,upper", 0) == 0);
}

TEST_CASE("reruns are byte-identical") {
    Scratch s("determinism");
    const std::string cfg = s.write("in.json", R"({"seed": 7, "map": {"kind": "min_linear",
        "matrices": [[[1, 2, 0], [0, 1, 1], [1, 0, 1]], [[2, 1, 1], [1, 0, 2], [0, 1, 1]]]}})");
    for (Command c : {Command::Radius, Command::Functional, Command::Validate}) {
        REQUIRE(invoke(c, cfg, s.dir / "a").code == kSuccess);
        REQUIRE(invoke(c, cfg, s.dir / "b").code == kSuccess);
        CHECK(slurp(s.dir / "a" / "result.json") == slurp(s.dir / "b" / "result.json"));
        CHECK(slurp(s.dir / "a" / "manifest.json") == slurp(s.dir / "b" / "manifest.json"));
    }
}

TEST_CASE("seed override is recorded") {
    Scratch s("seed");
    const std::string cfg = s.write("in.json", R"({"map": {"matrix": [[1, 2], [3, 1]]}})");
    RunConfig rc;
    rc.command = Command::Validate;
    rc.input_path = cfg;
    rc.output_dir = (s.dir / "out").string();
    rc.seed = 42;
    rc.quiet = true;
    std::ostringstream out, err;
    CHECK(run(rc, out, err) == kSuccess);
    CHECK(out.str().empty());
    CHECK(load(s.dir / "out" / "result.json")["seed"] == 42);
    CHECK(load(s.dir / "out" / "manifest.json")["seed"] == 42);
}

TEST_CASE("two-sex commands") {
    Scratch s("twosex");
    const std::string cfg = s.write("in.json", kSingleCell);
    const Outcome a = invoke(Command::TwosexAssess, cfg, s.dir / "assess");
    REQUIRE(a.code == kSuccess);
    const io::Json r = load(s.dir / "assess" / "result.json");
    CHECK(r["verdict"] == "extinction");
    CHECK(r["radius"]["value"].get<double>() == doctest::Approx(0.25).epsilon(1e-8));

    const Outcome t = invoke(Command::TwosexSimulate, cfg, s.dir / "sim");
    REQUIRE(t.code == kSuccess);
    const std::string csv = slurp(s.dir / "sim" / "trajectory.csv");
    CHECK(csv.rfind("year,log_total_mass,gamma_estimate", 0) == 0);
    CHECK(load(s.dir / "sim" / "result.json")["final_gamma"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("non-convergence exits 2 with partial output") {
    Scratch s("nonconv");
    const std::string cfg = s.write("in.json", R"({"map": {"matrix": [[1, 0.001], [0.002, 1]]},
        "u": [1, 1], "tolerances": {"inner_tol": 1e-15, "max_inner": 2}})");
    const Outcome o = invoke(Command::Eigen, cfg, s.dir / "out");
    CHECK(o.code == kNonConvergence);
    const io::Json m = load(s.dir / "out" / "manifest.json");
    CHECK(m["exit_code"] == 2);
    CHECK(fs::exists(s.dir / "out" / "trace.csv"));
    CHECK(load(s.dir / "out" / "result.json")["converged"] == false);
}

TEST_CASE("validate reports the oracle for linear maps") {
    Scratch s("validate");
    const std::string cfg = s.write("in.json", R"({"map": {"matrix": [[0, 1], [1, 0]]}, "validate": {"trials": 100}})");
    REQUIRE(invoke(Command::Validate, cfg, s.dir / "out").code == kSuccess);
    const io::Json r = load(s.dir / "out" / "result.json");
    CHECK(r["trials"] == 100);
    CHECK(r["oracle"]["value"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("missing input file") {
    Scratch s("missing");
    const Outcome o = invoke(Command::Radius, (s.dir / "nope.json").string(), s.dir / "out");
    CHECK(o.code == kValidationError);
    CHECK(o.err.find("nope.json") != std::string::npos);
}
