#pragma once

#include <span>
#include <vector>

#include "gla/common.hpp"

namespace gla {

// Finite Laplace average  n^{-1} sum_{k=0}^{n-1} lambda^{-k} samples[k].
//
// The sum is Kahan-compensated in ascending index order. The weight
// lambda^{-k} is maintained by incremental multiplication in a scaled
// (mantissa, exponent) representation and recomputed by binary powering every
// kWeightRenormInterval steps, so it never over/underflows on its own and
// carries only O(log k) ulp of error; only the per-term product
// lambda^{-k} * samples[k] must be representable. A term whose magnitude
// exceeds kOverflowGuard raises NumericError naming the step.
//
// For samples generated by an exact eigenfunction at lambda every term equals
// f(x0) and the average returns it to round-off; for a component mu^k with
// |mu| < |lambda| the average is the geometric Cesaro term
// (1/n)(1-(mu/lambda)^n)/(1-mu/lambda), decaying like 1/n.
//
// Subnormal samples are treated as zero: below the normal double floor the
// stored bits no longer track the trajectory (0.9 * smallest-denormal rounds
// back to itself), and amplifying that noise by lambda^{-k} would poison the
// sum while the true contribution of such terms is negligible wherever
// double-valued samples are adequate at all.
cplx laplace_average(std::span<const cplx> samples, cplx lambda);

// A sample carried as mantissa * 2^exponent. Long trajectories of stable
// systems decay below the double range at a few thousand steps; scaled
// samples keep the weight * sample product exact in lockstep, which is what
// exact-eigenfunction recovery at n = 1e5 requires.
using ComplexSample = ScaledCplx;

cplx laplace_average(std::span<const ComplexSample> samples, cplx lambda);

struct TimedSample {
    double t = 0.0;
    cplx value{0.0, 0.0};
};

// Continuous-time Laplace average  alpha^{-1} int_0^alpha e^{-t z} f(Phi_t x) dt
// by composite trapezoid quadrature on a uniform grid starting at t = 0;
// alpha is the last grid time and z the eigenvalue exponent.
//
// Raises NumericError ("target modulus below sample growth") when the running
// partial averages grow monotonically beyond 1e6 times the first sample --
// the dominance precondition is violated and the average diverges.
cplx continuous_laplace_average(std::span<const TimedSample> flow_samples, cplx lambda_exponent);

}  // namespace gla
