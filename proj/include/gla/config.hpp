#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gla/analytic.hpp"
#include "gla/hardy.hpp"
#include "gla/observable.hpp"
#include "gla/spectra.hpp"

namespace gla {

enum class RunMode { forward, inverse, continuous, sweep, verify };

struct ChartSpec {
    double cubic = 0.0;  // h(x) = x + cubic * x^3
    double lo = -0.5;
    double hi = 0.5;
};

struct SystemSpec {
    enum class Kind { diagonal, linear, conjugate, limit_cycle };
    Kind kind = Kind::diagonal;
    std::vector<cplx> eigenvalues;
    Eigen::MatrixXcd eigenvectors;  // linear only
    std::vector<ChartSpec> charts;  // conjugate only
    double rho_a0 = -1.0;           // limit cycle only
    std::vector<double> rho_cos;
    std::vector<double> rho_sin;
};

struct ObservableSpec {
    enum class Kind {
        zero,
        principal,
        product,
        combination,
        polynomial,
        limit_cycle_eigenfunction,
        pullback_principal,
    };
    Kind kind = Kind::zero;
    int j = 1;                       // principal / pullback_principal
    std::vector<int> m;              // product
    int lc_m = 0, lc_n = 0;          // limit-cycle eigenfunction
    struct Term {
        std::vector<int> m;
        cplx weight{1.0, 0.0};
    };
    std::vector<Term> terms;         // combination
    RingPolynomial polynomial;       // polynomial
};

struct GridSpec {
    std::vector<double> center;
    double radius = 0.1;
    std::size_t count = 1;
};

struct ExperimentConfig {
    SystemSpec system;
    ObservableSpec observable;
    std::vector<std::vector<cplx>> x0_points;
    std::optional<GridSpec> x0_grid;
    int K = 1;
    int N = 0;
    std::vector<std::size_t> n_values;
    bool targets_all = false;
    std::vector<MultiIndex> targets;
    RunMode mode = RunMode::forward;
    double alpha = 10.0;   // continuous mode
    double dt = 1e-3;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    double grouping_tol = kDefaultGroupingTol;
};

// Parses and fully validates a strict-JSON experiment description. Unknown
// keys are rejected; every problem found is reported (ValidationError carries
// the complete list, each entry prefixed with its JSON path).
ExperimentConfig parse_config(const std::string& text);

}  // namespace gla
