#include <CLI11.hpp>
#include <iostream>

#include "axial/config.hpp"
#include "axial/harness.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Axial perturbation laboratory on the Schwarzschild exterior"};
    app.require_subcommand(1, 1);

    std::string config_path, out_dir = "out";
    int jobs = 0, scheme = 0;
    const char* studies[][2] = {{"evolve", "evolve the configured modes and write energies, bulks and trajectories"},
                                {"verify", "run the exact identity suite and the red-shift certification"},
                                {"decay", "evolve far enough to measure decay along the hyperboloidal slices"},
                                {"converge", "three-resolution convergence study"},
                                {"normalize-kerr", "fit and remove the linearized Kerr part of beta_1"}};
    for (auto& s : studies) {
        auto* sub = app.add_subcommand(s[0], s[1]);
        sub->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--scheme", scheme, "spatial order of the evolution")->check(CLI::IsMember({2, 4}));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : axial::kBadConfig;
    }
    const std::string study = app.get_subcommands().front()->get_name();

    axial::RunConfig cfg;
    try {
        cfg = config_path.empty() ? axial::config_from_map({}, study) : axial::load_config(config_path, study);
        if (jobs > 0) cfg.jobs = jobs;
        if (scheme > 0) cfg.scheme = scheme;
        axial::validate(cfg);
    } catch (const axial::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return axial::kBadConfig;
    }
    try {
        return axial::run_study(cfg, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return axial::kVerifyFail;
    }
}
