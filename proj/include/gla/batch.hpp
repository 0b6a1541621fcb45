#pragma once

#include <vector>

#include "gla/project.hpp"

namespace gla {

// One projection work item: evaluate the GLA projection of `observable` at
// eigenvalue `lambda` from base point x0s[x0_id] with n trajectory samples,
// forward or inverse.
struct ProjectionTask {
    std::size_t x0_id = 0;
    cplx lambda{0.0, 0.0};
    MultiIndex target;       // lattice index when known; used by inverse mode
    bool has_index = false;
    std::size_t n = 0;
    bool inverse = false;
};

struct TaskOutcome {
    GLAResult result;
    bool failed = false;
    std::string error;
};

// Evaluates every task. Tasks are independent, each one is computed by the
// strictly sequential per-point path, and results land in task order, so the
// output is identical for any worker count. `jobs` <= 1 or a build without
// OpenMP runs serially.
std::vector<TaskOutcome> run_projection_batch(const DiscreteSystem& system,
                                              const DiscreteLinearSystem* linear,
                                              const Observable& observable,
                                              const std::vector<State>& x0s,
                                              const CircleDecomposition& decomposition,
                                              const std::vector<ProjectionTask>& tasks,
                                              int jobs);

// Serial reference implementation; the parallel kernel must match it bitwise.
std::vector<TaskOutcome> run_projection_batch_serial(const DiscreteSystem& system,
                                                     const DiscreteLinearSystem* linear,
                                                     const Observable& observable,
                                                     const std::vector<State>& x0s,
                                                     const CircleDecomposition& decomposition,
                                                     const std::vector<ProjectionTask>& tasks);

}  // namespace gla
