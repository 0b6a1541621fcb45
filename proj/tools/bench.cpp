// Benchmark comparing the serial reference batch kernel against the
// OpenMP-parallel one on a grid of projection tasks.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gla/analytic.hpp"
#include "gla/batch.hpp"

using namespace gla;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n = 20000;
    std::size_t points = 64;
    if (argc > 1) n = static_cast<std::size_t>(std::atoll(argv[1]));
    if (argc > 2) points = static_cast<std::size_t>(std::atoll(argv[2]));

    Eigen::VectorXcd lambda(2);
    lambda << cplx(0.9, 0.0), cplx(0.5, 0.0);
    const DiscreteLinearSystem system = DiscreteLinearSystem::diagonal(lambda);
    const auto lattice = fixed_point_lattice({cplx(0.9, 0.0), cplx(0.5, 0.0)}, 2);
    const auto decomposition = decompose_circles(lattice);

    const AdjointBasis basis = adjoint_basis(system.eigenvector_matrix());
    const Observable f = sum(sum(principal_eigenfunction(basis, 1),
                                 principal_eigenfunction(basis, 2)),
                             product_eigenfunction(basis, {1, 1}));

    std::vector<State> x0s;
    for (std::size_t i = 0; i < points; ++i) {
        State x(2);
        x << cplx(0.3 + 0.5 * static_cast<double>(i) / static_cast<double>(points), 0.0),
            cplx(0.2 + 0.6 * static_cast<double>(i) / static_cast<double>(points), 0.0);
        x0s.push_back(std::move(x));
    }

    std::vector<ProjectionTask> tasks;
    for (std::size_t x0_id = 0; x0_id < x0s.size(); ++x0_id)
        for (const auto& circle : decomposition.circles)
            for (const auto& entry : circle.members) {
                ProjectionTask t;
                t.x0_id = x0_id;
                t.lambda = entry.value;
                t.target = entry.index;
                t.has_index = true;
                t.n = n;
                tasks.push_back(std::move(t));
            }

    std::printf("workload: %zu tasks, n = %zu\n", tasks.size(), n);

    auto t0 = clock_type::now();
    const auto serial =
        run_projection_batch_serial(system, &system, f, x0s, decomposition, tasks);
    const double t_serial = seconds_since(t0);
    std::printf("serial reference      : %8.3f s\n", t_serial);

    int max_jobs = 4;
#ifdef _OPENMP
    max_jobs = omp_get_max_threads();
#endif
    for (int jobs : {2, max_jobs}) {
        if (jobs < 2) continue;
        t0 = clock_type::now();
        const auto parallel =
            run_projection_batch(system, &system, f, x0s, decomposition, tasks, jobs);
        const double t_par = seconds_since(t0);
        bool identical = parallel.size() == serial.size();
        for (std::size_t i = 0; identical && i < parallel.size(); ++i)
            identical = parallel[i].result.value == serial[i].result.value &&
                        parallel[i].result.n == serial[i].result.n;
        std::printf("openmp jobs=%-2d        : %8.3f s   speedup %.2fx   results %s\n", jobs,
                    t_par, t_serial / t_par, identical ? "identical" : "DIFFER");
        if (!identical) return 1;
    }
    return 0;
}
