#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gla/runner.hpp"

namespace {

constexpr const char* kVersion = "gla 0.1.0";

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw gla::ValidationError({"cannot read config file: " + path});
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int default_jobs() {
    if (const char* env = std::getenv("GLA_JOBS")) {
        const int j = std::atoi(env);
        if (j >= 1) return j;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral projections of Koopman operators via generalized Laplace averages"};
    app.set_version_flag("--version", kVersion);

    std::string config_path;
    std::string out_dir;
    int jobs = default_jobs();

    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
    run_cmd->add_option("config", config_path, "JSON experiment config")->required();
    run_cmd->add_option("--out", out_dir, "output directory (default: config's output_dir)");
    run_cmd->add_option("--jobs", jobs, "parallel workers (default: GLA_JOBS or 1)");

    auto* verify_cmd =
        app.add_subcommand("verify", "run in verify mode and report error-vs-bound status");
    verify_cmd->add_option("config", config_path, "JSON experiment config")->required();
    verify_cmd->add_option("--out", out_dir, "output directory");
    verify_cmd->add_option("--jobs", jobs, "parallel workers");

    auto* lattice_cmd =
        app.add_subcommand("lattice", "print the circle decomposition of the config's lattice");
    lattice_cmd->add_option("config", config_path, "JSON experiment config")->required();

    app.require_subcommand(0, 1);
    CLI11_PARSE(app, argc, argv);

    if (!*run_cmd && !*verify_cmd && !*lattice_cmd) {
        std::cout << app.help();
        return 0;
    }

    try {
        gla::ExperimentConfig cfg = gla::parse_config(read_file(config_path));
        if (*lattice_cmd) {
            gla::print_lattice(cfg, std::cout);
            return 0;
        }
        if (*verify_cmd) cfg.mode = gla::RunMode::verify;
        gla::RunOptions opts;
        opts.out_dir = out_dir;
        opts.jobs = jobs;
        gla::run(cfg, opts);
        std::cout << "wrote results to "
                  << (out_dir.empty() ? cfg.output_dir : out_dir) << "\n";
        return 0;
    } catch (const gla::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const gla::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const gla::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
