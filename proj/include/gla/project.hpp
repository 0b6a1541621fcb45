#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gla/laplace.hpp"
#include "gla/observable.hpp"
#include "gla/spectra.hpp"

namespace gla {

// Result of one spectral projection at a base point.
//
// `value` is the projection P_lambda f(x0). `n` is the number of weighted
// terms actually averaged: the estimator stops early when late terms drift
// from the leading ones (fp noise amplified by |lambda|^{-k}, or mass the
// truncated lattice cannot represent), so exact lattice data uses the full
// schedule and noisy tails are excluded instead of poisoning the average.
//
// `cesaro_bound` is the a-priori contamination bound
//     (1/n) * 1/(1 - r_next/r_target) * residual_sup
// where r_next is the radius of the nearest circle on the un-peeled side and
// residual_sup the sup over the averaging window of per-term coefficient
// magnitudes; it is unavailable when no such circle exists.
//
// `peel_trace` lists the (eigenvalue, projection value) pairs subtracted
// before the target average, in schedule order.
struct GLAResult {
    cplx value{0.0, 0.0};
    std::size_t n = 0;
    std::optional<double> cesaro_bound;
    double residual_sup = 0.0;
    std::vector<std::pair<cplx, cplx>> peel_trace;
};

// Recursive GLA projection: circles of larger radius are processed first in
// descending order on one shared sample vector, each circle's per-eigenvalue
// projections are estimated, their components subtracted, and the Laplace
// average at the target is taken last.
//
// Each per-eigenvalue estimate is the Laplace average of the residual run
// through the lattice annihilator (a cascade of first-order differences with
// one root per other distinct lattice value), normalized by the annihilator's
// value at the target. On data representable in the truncated lattice the
// cancellation is algebraic: every other component is removed exactly at any
// n exceeding the number of distinct values, which is what makes the finite
// recursion usable at finite n (a plain residual average would re-amplify
// the O(1/n) peel error by (r/r_target)^n at lower circles).
GLAResult gla_project(const DiscreteSystem& system, const Observable& f, const State& x0,
                      const MultiIndex& target, const CircleDecomposition& decomposition,
                      std::size_t n);

// Same, at an arbitrary complex target (lattice member or not). A
// non-eigenvalue lambda between circles yields a value at round-off level for
// lattice-representable observables.
GLAResult gla_project_at(const DiscreteSystem& system, const Observable& f, const State& x0,
                         cplx lambda, const CircleDecomposition& decomposition, std::size_t n);

// Shared-samples variant used by gla_project, gla_sweep and the batch
// kernels; samples[k] = f(Phi^k x0).
GLAResult project_samples(std::span<const cplx> samples, cplx lambda,
                          const CircleDecomposition& decomposition);

struct SweepResult {
    std::vector<std::pair<cplx, GLAResult>> projections;  // descending circles
    // sup_k | samples_k - sum_j value_j * lambda_j^k |: the part of f the
    // truncated lattice cannot represent, evaluated along the trajectory.
    double reconstruction_residual = 0.0;
};

// Single descending pass over all circles with one running residual vector;
// per-eigenvalue results equal the corresponding gla_project calls.
SweepResult gla_sweep(const DiscreteSystem& system, const Observable& f, const State& x0,
                      const CircleDecomposition& decomposition, std::size_t n);

// Inverse-iteration GLA: averages n^{-1} sum lambda^k f(A^{-k} x0) with
// smaller-modulus circles peeled first. The inverse trajectory is truncated
// to the longest prefix the overflow guard admits (iterates grow like
// |lambda_min|^{-k}); the effective sample count is reported in the result.
// The trace estimates are computed through the same annihilator, which
// removes the smaller circles algebraically, so no residual with
// catastrophically cancelling huge terms is ever materialized.
GLAResult inverse_gla(const DiscreteLinearSystem& system, const Observable& f, const State& x0,
                      const MultiIndex& target, const CircleDecomposition& decomposition,
                      std::size_t n);

// Evaluate f along a trajectory; throws NumericError naming the step when a
// sample is not finite.
std::vector<cplx> sample_observable(const DiscreteSystem& system, const Observable& f,
                                    const State& x0, std::size_t n);

}  // namespace gla
