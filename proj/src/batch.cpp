#include "gla/batch.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gla {

namespace {

TaskOutcome run_one(const DiscreteSystem& system, const DiscreteLinearSystem* linear,
                    const Observable& observable, const std::vector<State>& x0s,
                    const CircleDecomposition& decomposition, const ProjectionTask& task) {
    TaskOutcome out;
    try {
        const State& x0 = x0s.at(task.x0_id);
        if (task.inverse) {
            if (linear == nullptr)
                throw std::invalid_argument("inverse mode needs an invertible linear system");
            if (!task.has_index)
                throw std::invalid_argument("inverse mode needs a lattice target index");
            out.result = inverse_gla(*linear, observable, x0, task.target, decomposition, task.n);
        } else {
            out.result =
                gla_project_at(system, observable, x0, task.lambda, decomposition, task.n);
        }
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

}  // namespace

std::vector<TaskOutcome> run_projection_batch_serial(const DiscreteSystem& system,
                                                     const DiscreteLinearSystem* linear,
                                                     const Observable& observable,
                                                     const std::vector<State>& x0s,
                                                     const CircleDecomposition& decomposition,
                                                     const std::vector<ProjectionTask>& tasks) {
    std::vector<TaskOutcome> out(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i)
        out[i] = run_one(system, linear, observable, x0s, decomposition, tasks[i]);
    return out;
}

std::vector<TaskOutcome> run_projection_batch(const DiscreteSystem& system,
                                              const DiscreteLinearSystem* linear,
                                              const Observable& observable,
                                              const std::vector<State>& x0s,
                                              const CircleDecomposition& decomposition,
                                              const std::vector<ProjectionTask>& tasks,
                                              int jobs) {
#ifdef _OPENMP
    if (jobs > 1) {
        std::vector<TaskOutcome> out(tasks.size());
        const auto count = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (std::ptrdiff_t i = 0; i < count; ++i)
            out[static_cast<std::size_t>(i)] =
                run_one(system, linear, observable, x0s, decomposition,
                        tasks[static_cast<std::size_t>(i)]);
        return out;
    }
#else
    (void)jobs;
#endif
    return run_projection_batch_serial(system, linear, observable, x0s, decomposition, tasks);
}

}  // namespace gla
