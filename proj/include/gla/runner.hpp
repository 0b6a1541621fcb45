#pragma once

#include <filesystem>
#include <string>

#include "gla/config.hpp"

namespace gla {

struct RunOptions {
    std::string out_dir;  // overrides the config's output_dir when nonempty
    int jobs = 1;
};

// Runs the experiment and writes results.csv, results.json, lattice.csv and
// convergence.svg into the output directory. Partial outputs are removed if
// the run fails. Throws ValidationError / NumericError / Error; the CLI maps
// these to exit codes 2 and 3.
void run(const ExperimentConfig& config, const RunOptions& options);

// Prints the circle decomposition of the config's lattice to the stream.
void print_lattice(const ExperimentConfig& config, std::ostream& os);

// Doubles are written with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace gla
