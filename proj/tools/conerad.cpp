#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "conerad/cli.hpp"

int main(int argc, char** argv) {
    using namespace conerad::cli;

    CLI::App app{"Cone spectral radius, eigenvectors and two-sex persistence"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunConfig config;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config.input_path, "JSON input file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", config.output_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Random seed (overrides the input file)");
        sub->add_flag("--quiet", config.quiet, "Suppress the summary line");
    };

    const std::pair<Command, const char*> commands[] = {
        {Command::Radius, "Certified bracket and power-quotient estimate of r_+"},
        {Command::Eigen, "Positive eigenvector or sub-eigenvector"},
        {Command::Functional, "Eigenfunctional from the left resolvent"},
        {Command::TwosexAssess, "Persistence verdict for a two-sex model"},
        {Command::TwosexSimulate, "Yearly trajectory of a two-sex model"},
        {Command::Validate, "Randomized homogeneity / monotonicity checks"},
    };
    for (const auto& [command, help] : commands) {
        CLI::App* sub = app.add_subcommand(to_string(command), help);
        add_common(sub);
        sub->callback([&config, command = command] { config.command = command; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidationError;
    }
    for (CLI::App* sub : app.get_subcommands()) {
        if (sub->count("--seed") > 0) config.seed = seed;
    }
    return run(config, std::cout, std::cerr);
}
